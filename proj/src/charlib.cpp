#include "prfront/charlib.hpp"

#include "prfront/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace prfront {

std::string_view to_string(Resource r) {
    switch (r) {
        case Resource::Lut: return "lut";
        case Resource::Bram36: return "bram36";
        case Resource::Dsp: return "dsp";
    }
    return "?";
}

std::string_view to_string(DesignStyle s) {
    switch (s) {
        case DesignStyle::Any: return "any";
        case DesignStyle::Asic: return "asic";
        case DesignStyle::Pr: return "pr";
    }
    return "?";
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Fatal: return "fatal";
    }
    return "?";
}

const Rational& ResourceVector::operator[](Resource r) const {
    switch (r) {
        case Resource::Lut: return lut;
        case Resource::Bram36: return bram36;
        case Resource::Dsp: return dsp;
    }
    return lut;
}

Rational& ResourceVector::operator[](Resource r) {
    return const_cast<Rational&>(static_cast<const ResourceVector&>(*this)[r]);
}

bool ResourceVector::fits_within(const ResourceVector& budget) const {
    return !first_violation(budget).has_value();
}

std::optional<Resource> ResourceVector::first_violation(const ResourceVector& budget) const {
    for (Resource r : kAllResources) {
        if ((*this)[r] > budget[r]) return r;
    }
    return std::nullopt;
}

ResourceVector& ResourceVector::operator+=(const ResourceVector& other) {
    lut += other.lut;
    bram36 += other.bram36;
    dsp += other.dsp;
    return *this;
}

bool dominates(const ModuleVariant& a, const ModuleVariant& b) {
    if (!a.resources.fits_within(b.resources)) return false;
    if (a.latency_ms > b.latency_ms || a.throughput_fps < b.throughput_fps) return false;
    return a.resources != b.resources || a.latency_ms < b.latency_ms || a.throughput_fps > b.throughput_fps;
}

void ModuleLibrary::add(ModuleVariant variant) {
    if (find(variant.task_name, variant.variant_id) != nullptr) {
        throw DuplicateError(0, "duplicate variant (" + variant.task_name + ", " + variant.variant_id + ")");
    }
    variants_.push_back(std::move(variant));
}

void ModuleLibrary::merge(const ModuleLibrary& other) {
    for (const auto& v : other.variants()) add(v);
}

std::vector<const ModuleVariant*> ModuleLibrary::for_task(std::string_view task) const {
    std::vector<const ModuleVariant*> out;
    for (const auto& v : variants_) {
        if (v.task_name == task) out.push_back(&v);
    }
    return out;
}

const ModuleVariant* ModuleLibrary::find(std::string_view task, std::string_view variant_id) const {
    for (const auto& v : variants_) {
        if (v.task_name == task && v.variant_id == variant_id) return &v;
    }
    return nullptr;
}

ResourceVector Platform::region_resources(const Rational& fraction) const {
    for (const auto& shape : regions) {
        if (shape.fraction == fraction) return shape.resources;
    }
    return fraction * budget;
}

// ---------------------------------------------------------------------------
// Record reader

namespace {

struct Field {
    std::string value;
    std::size_t line;
};

struct Record {
    std::string kind;
    std::size_t line = 0;
    std::map<std::string, Field> fields;
};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<Record> split_records(std::string_view text) {
    std::vector<Record> records;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw ParseError(line_no, "malformed record header '" + line + "'");
            records.push_back(Record{trim(line.substr(1, line.size() - 2)), line_no, {}});
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
        if (records.empty()) throw ParseError(line_no, "field outside of any record");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
        auto [it, inserted] = records.back().fields.emplace(key, Field{value, line_no});
        if (!inserted) throw ParseError(line_no, "repeated key '" + key + "'");
    }
    return records;
}

class RecordReader {
public:
    RecordReader(const Record& record, std::set<std::string> allowed) : record_(record) {
        for (const auto& [key, field] : record.fields) {
            if (!allowed.count(key)) {
                throw ParseError(field.line, "unknown key '" + key + "' in [" + record.kind + "] record");
            }
        }
    }

    bool has(const std::string& key) const { return record_.fields.count(key) != 0; }

    std::size_t line_of(const std::string& key) const {
        auto it = record_.fields.find(key);
        return it == record_.fields.end() ? record_.line : it->second.line;
    }

    std::string text(const std::string& key) const {
        return require(key).value;
    }

    std::string identifier(const std::string& key) const {
        const Field& f = require(key);
        for (char c : f.value) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                throw ParseError(f.line, "'" + key + "' must be an identifier without whitespace");
            }
        }
        return f.value;
    }

    Rational number(const std::string& key) const {
        const Field& f = require(key);
        try {
            return parse_rational(f.value);
        } catch (const std::invalid_argument&) {
            throw ParseError(f.line, "'" + key + "' is not a decimal rational: '" + f.value + "'");
        }
    }

    Rational nonneg(const std::string& key) const {
        Rational v = number(key);
        if (v < 0) throw DomainError("line " + std::to_string(line_of(key)) + ": '" + key + "' must be >= 0");
        return v;
    }

    Rational positive(const std::string& key) const {
        Rational v = number(key);
        if (v <= 0) throw DomainError("line " + std::to_string(line_of(key)) + ": '" + key + "' must be > 0");
        return v;
    }

    Rational nonneg_integer(const std::string& key) const {
        Rational v = nonneg(key);
        if (!is_integer(v)) throw ParseError(line_of(key), "'" + key + "' must be an integer");
        return v;
    }

    std::uint64_t count(const std::string& key) const {
        Rational v = nonneg_integer(key);
        if (v > Rational(std::numeric_limits<std::uint64_t>::max())) {
            throw ParseError(line_of(key), "'" + key + "' is out of range");
        }
        return boost::multiprecision::numerator(v).convert_to<std::uint64_t>();
    }

private:
    const Field& require(const std::string& key) const {
        auto it = record_.fields.find(key);
        if (it == record_.fields.end()) {
            throw ParseError(record_.line, "[" + record_.kind + "] record is missing field '" + key + "'");
        }
        return it->second;
    }

    const Record& record_;
};

[[noreturn]] void unexpected(const Record& r, std::string_view where) {
    throw ParseError(r.line, "unexpected [" + r.kind + "] record in " + std::string(where));
}

DesignStyle parse_style(const RecordReader& rd) {
    if (!rd.has("style")) return DesignStyle::Any;
    std::string s = rd.text("style");
    if (s == "any") return DesignStyle::Any;
    if (s == "asic") return DesignStyle::Asic;
    if (s == "pr") return DesignStyle::Pr;
    throw ParseError(rd.line_of("style"), "style must be one of asic, pr, any");
}

ModuleVariant read_variant(const Record& record) {
    RecordReader rd(record, {"task", "variant", "lut", "bram36", "dsp", "latency_ms", "throughput_fps",
                             "bandwidth_mbps", "output_bytes", "style"});
    ModuleVariant v;
    v.task_name = rd.identifier("task");
    v.variant_id = rd.identifier("variant");
    v.resources.lut = rd.nonneg_integer("lut");
    v.resources.bram36 = rd.nonneg("bram36");
    v.resources.dsp = rd.nonneg_integer("dsp");

    const bool has_lat = rd.has("latency_ms");
    const bool has_tput = rd.has("throughput_fps");
    if (!has_lat && !has_tput) {
        throw ParseError(record.line, "[variant] record is missing field 'latency_ms' (or 'throughput_fps')");
    }
    // One frame in flight per module: latency and throughput are reciprocal when only one is given.
    if (has_lat) v.latency_ms = rd.positive("latency_ms");
    if (has_tput) v.throughput_fps = rd.positive("throughput_fps");
    if (!has_lat) v.latency_ms = Rational(1000) / v.throughput_fps;
    if (!has_tput) v.throughput_fps = Rational(1000) / v.latency_ms;

    v.bandwidth_mbps = rd.has("bandwidth_mbps") ? rd.nonneg("bandwidth_mbps") : Rational(0);
    v.output_bytes = rd.has("output_bytes") ? rd.count("output_bytes") : 0;
    v.style = parse_style(rd);
    return v;
}

}  // namespace

ModuleLibrary parse_library(std::string_view text) {
    ModuleLibrary library;
    for (const auto& record : split_records(text)) {
        if (record.kind != "variant") unexpected(record, "a module library");
        ModuleVariant v = read_variant(record);
        if (library.find(v.task_name, v.variant_id) != nullptr) {
            throw DuplicateError(record.line, "duplicate variant (" + v.task_name + ", " + v.variant_id + ")");
        }
        library.add(std::move(v));
    }
    return library;
}

Application parse_application(std::string_view text) {
    Application app;
    bool seen_header = false;
    std::set<std::string> names;
    for (const auto& record : split_records(text)) {
        if (record.kind == "application") {
            if (seen_header) throw ParseError(record.line, "more than one [application] record");
            RecordReader rd(record, {"name"});
            app.name = rd.identifier("name");
            seen_header = true;
        } else if (record.kind == "task") {
            if (!seen_header) throw ParseError(record.line, "[task] record before [application]");
            RecordReader rd(record, {"name", "input_bytes"});
            TaskSpec task{rd.identifier("name"), rd.count("input_bytes")};
            if (!names.insert(task.name).second) {
                throw DuplicateError(record.line, "duplicate task '" + task.name + "'");
            }
            app.tasks.push_back(std::move(task));
        } else {
            unexpected(record, "an application file");
        }
    }
    if (!seen_header) throw ParseError(0, "no [application] record");
    return app;
}

Platform parse_platform(std::string_view text) {
    Platform platform;
    bool seen = false;
    for (const auto& record : split_records(text)) {
        if (record.kind == "platform") {
            if (seen) throw ParseError(record.line, "more than one [platform] record");
            RecordReader rd(record, {"name", "budget_lut", "budget_bram36", "budget_dsp", "pr_bandwidth_mbps",
                                     "bitstream_bytes_full", "mem_bandwidth_mbps", "buffer_capacity_bytes"});
            if (rd.has("name")) platform.name = rd.identifier("name");
            platform.budget.lut = rd.nonneg_integer("budget_lut");
            platform.budget.bram36 = rd.nonneg("budget_bram36");
            platform.budget.dsp = rd.nonneg_integer("budget_dsp");
            platform.pr_bandwidth_mbps = rd.positive("pr_bandwidth_mbps");
            if (rd.number("bitstream_bytes_full") <= 0) {
                throw DomainError("line " + std::to_string(rd.line_of("bitstream_bytes_full")) +
                                  ": 'bitstream_bytes_full' must be > 0");
            }
            platform.bitstream_bytes_full = rd.count("bitstream_bytes_full");
            platform.mem_bandwidth_mbps = rd.positive("mem_bandwidth_mbps");
            if (rd.number("buffer_capacity_bytes") <= 0) {
                throw DomainError("line " + std::to_string(rd.line_of("buffer_capacity_bytes")) +
                                  ": 'buffer_capacity_bytes' must be > 0");
            }
            platform.buffer_capacity_bytes = rd.count("buffer_capacity_bytes");
            seen = true;
        } else if (record.kind == "region") {
            RecordReader rd(record, {"fraction", "lut", "bram36", "dsp"});
            RegionShape shape;
            shape.fraction = rd.positive("fraction");
            if (shape.fraction > 1) throw DomainError("line " + std::to_string(rd.line_of("fraction")) + ": region fraction must be <= 1");
            shape.resources = {rd.nonneg_integer("lut"), rd.nonneg("bram36"), rd.nonneg_integer("dsp")};
            for (const auto& other : platform.regions) {
                if (other.fraction == shape.fraction) throw DuplicateError(record.line, "duplicate region fraction");
            }
            platform.regions.push_back(std::move(shape));
        } else {
            unexpected(record, "a platform file");
        }
    }
    if (!seen) throw ParseError(0, "no [platform] record");
    return platform;
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize(const ModuleLibrary& library) {
    std::ostringstream out;
    bool first = true;
    for (const auto& v : library.variants()) {
        if (!first) out << '\n';
        first = false;
        out << "[variant]\n"
            << "task = " << v.task_name << '\n'
            << "variant = " << v.variant_id << '\n'
            << "lut = " << to_exact(v.resources.lut) << '\n'
            << "bram36 = " << to_exact(v.resources.bram36) << '\n'
            << "dsp = " << to_exact(v.resources.dsp) << '\n'
            << "latency_ms = " << to_exact(v.latency_ms) << '\n'
            << "throughput_fps = " << to_exact(v.throughput_fps) << '\n'
            << "bandwidth_mbps = " << to_exact(v.bandwidth_mbps) << '\n'
            << "output_bytes = " << v.output_bytes << '\n';
        if (v.style != DesignStyle::Any) out << "style = " << to_string(v.style) << '\n';
    }
    return out.str();
}

std::string serialize(const Application& application) {
    std::ostringstream out;
    out << "[application]\nname = " << application.name << '\n';
    for (const auto& t : application.tasks) {
        out << "\n[task]\nname = " << t.name << "\ninput_bytes = " << t.input_bytes << '\n';
    }
    return out.str();
}

std::string serialize(const Platform& p) {
    std::ostringstream out;
    out << "[platform]\n";
    if (!p.name.empty()) out << "name = " << p.name << '\n';
    out << "budget_lut = " << to_exact(p.budget.lut) << '\n'
        << "budget_bram36 = " << to_exact(p.budget.bram36) << '\n'
        << "budget_dsp = " << to_exact(p.budget.dsp) << '\n'
        << "pr_bandwidth_mbps = " << to_exact(p.pr_bandwidth_mbps) << '\n'
        << "bitstream_bytes_full = " << p.bitstream_bytes_full << '\n'
        << "mem_bandwidth_mbps = " << to_exact(p.mem_bandwidth_mbps) << '\n'
        << "buffer_capacity_bytes = " << p.buffer_capacity_bytes << '\n';
    for (const auto& r : p.regions) {
        out << "\n[region]\nfraction = " << to_exact(r.fraction) << "\nlut = " << to_exact(r.resources.lut)
            << "\nbram36 = " << to_exact(r.resources.bram36) << "\ndsp = " << to_exact(r.resources.dsp) << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has_fatal() const {
    return std::any_of(findings.begin(), findings.end(), [](const Finding& f) { return f.severity == Severity::Fatal; });
}

std::vector<Finding> ValidationReport::with_code(std::string_view code) const {
    std::vector<Finding> out;
    std::copy_if(findings.begin(), findings.end(), std::back_inserter(out),
                 [&](const Finding& f) { return f.code == code; });
    return out;
}

ValidationReport validate(const ModuleLibrary& library, const Application& application, const Platform& platform) {
    ValidationReport report;
    auto add = [&](Severity s, std::string code, std::string message) {
        report.findings.push_back({s, std::move(code), std::move(message)});
    };

    if (application.tasks.empty()) {
        add(Severity::Fatal, "empty-application", "application '" + application.name + "' has no tasks");
    }

    for (const auto& task : application.tasks) {
        auto variants = library.for_task(task.name);
        if (variants.empty()) {
            add(Severity::Fatal, "task-uncovered", "task '" + task.name + "' has no variant in the library");
            continue;
        }
        bool any_fits = false;
        for (const auto* v : variants) {
            if (auto bad = v->resources.first_violation(platform.budget)) {
                add(Severity::Warning, "non-fitting",
                    "variant (" + v->task_name + ", " + v->variant_id + ") exceeds the budget on " +
                        std::string(to_string(*bad)));
            } else {
                any_fits = true;
            }
        }
        if (!any_fits) {
            add(Severity::Fatal, "task-unfit", "task '" + task.name + "' has no variant fitting the budget");
        }
    }

    // Dominance is only meaningful between variants that can stand in for each other.
    const auto& all = library.variants();
    for (const auto& a : all) {
        for (const auto& b : all) {
            if (&a == &b || a.task_name != b.task_name) continue;
            const bool comparable = a.style == DesignStyle::Any || a.style == b.style;
            if (comparable && dominates(a, b)) {
                add(Severity::Warning, "dominated",
                    "variant (" + b.task_name + ", " + b.variant_id + ") is dominated by " + a.variant_id);
            }
        }
    }

    for (const auto& v : all) {
        if (v.bandwidth_mbps > platform.mem_bandwidth_mbps) {
            add(Severity::Info, "bandwidth-throttled",
                "variant (" + v.task_name + ", " + v.variant_id + ") demands " + to_fixed(v.bandwidth_mbps, 3) +
                    " MB/s, above the platform's " + to_fixed(platform.mem_bandwidth_mbps, 3) + " MB/s");
        }
    }
    return report;
}

}  // namespace prfront
