#pragma once

// Closed-form performance model for ASIC-style and PR-style execution of a task chain.
// Times are in milliseconds, rates in runs (frames) per second, sizes in bytes,
// bandwidths in MB/s with MB = 10^6 bytes.

#include "prfront/charlib.hpp"
#include "prfront/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prfront {

enum class Strategy { Asic, Pr1, Pr2, Prk };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

/// The chosen variant for each task, in application order.
struct VariantAssignment {
    std::vector<ModuleVariant> variants;

    std::size_t size() const { return variants.size(); }
    ResourceVector total_resources() const;
    std::vector<std::string> variant_ids() const;
    friend bool operator==(const VariantAssignment&, const VariantAssignment&) = default;
};

/// Builds an assignment covering every task of `app` exactly once.
/// Throws PlanError for a missing task choice or unknown variant id.
VariantAssignment make_assignment(const Application& app, const ModuleLibrary& library,
                                  const std::map<std::string, std::string>& choice);

struct ExecutionPlan {
    Strategy strategy = Strategy::Asic;
    VariantAssignment assignment;
    int batch = 1;
    int k = 1;
    /// Region size override; unset means 1 (Pr1), 1/2 (Pr2) or 1/k (Prk).
    std::optional<Rational> region_fraction;

    friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;
};

/// Throws PlanError when strategy-specific fields are missing, present where not
/// allowed, or out of range.
void check_plan(const ExecutionPlan& plan);

/// check_plan plus resource fit (budget for Asic, region shape otherwise). Buffers are not checked.
void check_feasible(const ExecutionPlan& plan, const Application& app, const Platform& platform);

/// Region fraction in effect (0 for Asic).
Rational region_fraction(const ExecutionPlan& plan);
/// Number of physical regions (modules for Asic).
int region_count(const ExecutionPlan& plan);

/// One-line description, e.g. "pr1 f=1 B=64 [hog:p1 cnn:p1 lstm:p1]".
std::string describe(const ExecutionPlan& plan);

// --- Primitive formulas -------------------------------------------------------

/// Time to reconfigure a region of the given fraction: proportional to region size.
Rational pr_time_ms(const Rational& region_fraction, const Platform& platform);

/// Peak throughput scaled down by BW_total / BW_i when the variant's demand exceeds supply.
Rational effective_throughput(const ModuleVariant& variant, const Platform& platform);

Rational asic_latency(const VariantAssignment& assignment, const Platform& platform);
Rational asic_throughput(const VariantAssignment& assignment, const Platform& platform);

/// Lower latency bound for one region spanning the full fabric, PR time excluded.
Rational pr1_latency_bound(const Application& app, const Platform& platform, const ModuleLibrary& library);
/// Upper throughput bound for one full-fabric region, PR time excluded.
Rational pr1_throughput_bound(const Application& app, const Platform& platform, const ModuleLibrary& library);

Rational pr1_latency(const VariantAssignment& assignment, const Platform& platform,
                     const Rational& region_fraction = Rational(1));
Rational pr1_throughput(const Application& app, const VariantAssignment& assignment, const Platform& platform,
                        int batch, const Rational& region_fraction = Rational(1));

/// Interleaved execution on two regions, including the initial load of the first module.
Rational pr2_latency(const VariantAssignment& assignment, const Platform& platform,
                     const Rational& region_fraction = Rational(1, 2));
/// Steady state of the interleaved schedule: one frame per sum of max(pr_time, 1/T_i).
Rational pr2_throughput(const VariantAssignment& assignment, const Platform& platform,
                        const Rational& region_fraction = Rational(1, 2));

/// k regions of size fraction (default 1/k), each running the batched serialized schedule.
Rational prk_throughput(const Application& app, const VariantAssignment& assignment, const Platform& platform,
                        int k, int batch, std::optional<Rational> region_fraction = std::nullopt);

/// Bytes of intermediate buffering for batch B: B times the sum of every task's input stream.
std::uint64_t buffer_requirement(const Application& app, const VariantAssignment& assignment, int batch);

struct Density {
    Rational value;
    Resource bottleneck = Resource::Bram36;
    Rational used;          // count of the bottleneck resource
    Rational utilization;   // used / budget of the bottleneck resource
};

/// Highest used/budget ratio among resources with a nonzero budget.
Density bottleneck_of(const ResourceVector& used, const Platform& platform);

/// `rate_per_second` divided by the used count of the bottleneck resource.
Density performance_density(const Rational& rate_per_second, const ResourceVector& used, const Platform& platform);

// --- Plan-level estimate -------------------------------------------------------

struct PerformanceEstimate {
    Rational latency_ms;
    Rational throughput_fps;
    std::uint64_t buffer_bytes = 0;
    Rational pr_time_per_region_ms;
    Rational bandwidth_peak_mbps;
    ResourceVector footprint;
    Resource bottleneck = Resource::Bram36;
    Rational bottleneck_used;
    Rational utilization;
    Rational throughput_density;  // fps per bottleneck unit
    Rational latency_density;     // (1/latency) s^-1 per bottleneck unit
};

/// Resources the plan occupies: summed variants for Asic, region shapes otherwise.
ResourceVector footprint(const ExecutionPlan& plan, const Platform& platform);

/// Evaluates every metric for a plan. Throws FeasibilityError, CapacityError or PlanError.
PerformanceEstimate estimate(const ExecutionPlan& plan, const Application& app, const Platform& platform);

}  // namespace prfront
