#pragma once

// Characterization data: module variants, applications and platforms, plus the
// line-oriented text format they are shipped in.
//
//   [variant]
//   task = hog
//   variant = p1
//   lut = 55635
//   ...
//
// Record headers are [variant], [application], [task], [platform] and [region].
// Values are exact decimal rationals ("206.5") or ratios ("1375/3").

#include "prfront/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prfront {

enum class Resource { Lut, Bram36, Dsp };

inline constexpr std::array<Resource, 3> kAllResources{Resource::Lut, Resource::Bram36, Resource::Dsp};

std::string_view to_string(Resource r);

struct ResourceVector {
    Rational lut;
    Rational bram36;
    Rational dsp;

    const Rational& operator[](Resource r) const;
    Rational& operator[](Resource r);

    /// Componentwise <=.
    bool fits_within(const ResourceVector& budget) const;
    /// First resource (lut, bram36, dsp order) exceeding `budget`, if any.
    std::optional<Resource> first_violation(const ResourceVector& budget) const;

    ResourceVector& operator+=(const ResourceVector& other);
    friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
    friend ResourceVector operator*(const Rational& s, const ResourceVector& v) {
        return {s * v.lut, s * v.bram36, s * v.dsp};
    }
    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;
};

/// Which design style a variant was characterized for. `Any` variants serve both.
enum class DesignStyle { Any, Asic, Pr };

std::string_view to_string(DesignStyle s);

struct ModuleVariant {
    std::string task_name;
    std::string variant_id;
    ResourceVector resources;
    Rational latency_ms;
    Rational throughput_fps;
    Rational bandwidth_mbps;
    std::uint64_t output_bytes = 0;
    DesignStyle style = DesignStyle::Any;

    bool usable_for_asic() const { return style != DesignStyle::Pr; }
    bool usable_for_pr() const { return style != DesignStyle::Asic; }

    friend bool operator==(const ModuleVariant&, const ModuleVariant&) = default;
};

/// True when `a` is at least as good as `b` everywhere (resources <=, latency <=,
/// throughput >=) and strictly better somewhere.
bool dominates(const ModuleVariant& a, const ModuleVariant& b);

class ModuleLibrary {
public:
    ModuleLibrary() = default;

    /// Throws DuplicateError on a repeated (task, variant) pair.
    void add(ModuleVariant variant);
    /// Adds every variant of `other`.
    void merge(const ModuleLibrary& other);

    const std::vector<ModuleVariant>& variants() const { return variants_; }
    std::vector<const ModuleVariant*> for_task(std::string_view task) const;
    const ModuleVariant* find(std::string_view task, std::string_view variant_id) const;
    bool empty() const { return variants_.empty(); }
    std::size_t size() const { return variants_.size(); }

    friend bool operator==(const ModuleLibrary&, const ModuleLibrary&) = default;

private:
    std::vector<ModuleVariant> variants_;
};

struct TaskSpec {
    std::string name;
    std::uint64_t input_bytes = 0;
    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// A strictly sequential chain of tasks.
struct Application {
    std::string name;
    std::vector<TaskSpec> tasks;

    std::size_t size() const { return tasks.size(); }
    friend bool operator==(const Application&, const Application&) = default;
};

/// A floorplanned PR region shape: the resources available to (and occupied by)
/// a region sized at `fraction` of the fabric.
struct RegionShape {
    Rational fraction;
    ResourceVector resources;
    friend bool operator==(const RegionShape&, const RegionShape&) = default;
};

struct Platform {
    std::string name;
    ResourceVector budget;
    Rational pr_bandwidth_mbps;
    std::uint64_t bitstream_bytes_full = 0;
    Rational mem_bandwidth_mbps;
    std::uint64_t buffer_capacity_bytes = 0;
    std::vector<RegionShape> regions;

    /// Resources of a region of the given fraction: a declared shape when one
    /// matches, otherwise `fraction * budget`.
    ResourceVector region_resources(const Rational& fraction) const;

    friend bool operator==(const Platform&, const Platform&) = default;
};

ModuleLibrary parse_library(std::string_view text);
Application parse_application(std::string_view text);
Platform parse_platform(std::string_view text);

std::string serialize(const ModuleLibrary& library);
std::string serialize(const Application& application);
std::string serialize(const Platform& platform);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);

enum class Severity { Info, Warning, Fatal };

std::string_view to_string(Severity s);

struct Finding {
    Severity severity;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool has_fatal() const;
    std::vector<Finding> with_code(std::string_view code) const;
};

ValidationReport validate(const ModuleLibrary& library, const Application& application, const Platform& platform);

}  // namespace prfront
