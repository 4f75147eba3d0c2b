#pragma once

#include <string>

namespace prfront {

/// Directory holding the shipped characterization data.
std::string default_data_dir();

/// Result tables for the activity, depth and facial studies, rebuilt from the
/// files in `data_dir`. Throws Error (ParseError, ...) when a file is missing or malformed.
std::string case_study_report(const std::string& data_dir);

}  // namespace prfront
