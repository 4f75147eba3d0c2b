#pragma once

#include "prfront/sim.hpp"

#include <string>
#include <vector>

namespace prfront {

/// SVG Gantt chart: one lane per region, run spans colored by task, PR spans hatched.
/// Output bytes depend only on the timeline. An empty timeline yields a placeholder chart.
std::string render_gantt(const std::vector<Event>& timeline);

}  // namespace prfront
