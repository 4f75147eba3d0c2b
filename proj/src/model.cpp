#include "prfront/model.hpp"

#include "prfront/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace prfront {

namespace {

const Rational kMsPerSecond(1000);

/// Per-run issue interval in ms at the variant's (throttled) throughput.
Rational run_interval_ms(const ModuleVariant& v, const Platform& platform) {
    return kMsPerSecond / effective_throughput(v, platform);
}

void require_fits(const VariantAssignment& assignment, const ResourceVector& capacity, std::string_view where) {
    for (const auto& v : assignment.variants) {
        if (auto bad = v.resources.first_violation(capacity)) {
            throw FeasibilityError(std::string(to_string(*bad)),
                                   "variant (" + v.task_name + ", " + v.variant_id + ") exceeds " +
                                       std::string(where) + " on " + std::string(to_string(*bad)) + ": needs " +
                                       to_fixed(v.resources[*bad], 1) + ", has " + to_fixed(capacity[*bad], 1));
        }
    }
}

void require_asic_fits(const VariantAssignment& assignment, const Platform& platform) {
    const ResourceVector total = assignment.total_resources();
    if (auto bad = total.first_violation(platform.budget)) {
        throw FeasibilityError(std::string(to_string(*bad)),
                               "assignment exceeds the budget on " + std::string(to_string(*bad)) + ": needs " +
                                   to_fixed(total[*bad], 1) + ", has " + to_fixed(platform.budget[*bad], 1));
    }
}

void require_fraction(const Rational& fraction, const Rational& limit, std::string_view strategy) {
    if (fraction <= 0) throw DomainError("region fraction must be > 0");
    if (fraction > limit) {
        throw PlanError(std::string(strategy) + " region fraction " + to_exact(fraction) + " exceeds " + to_exact(limit));
    }
}

void require_batch(int batch) {
    if (batch < 1) throw DomainError("batch size must be >= 1");
}

/// Best full-region variant per task under a "better" ordering.
template <typename Better>
std::vector<const ModuleVariant*> best_full_area(const Application& app, const Platform& platform,
                                                 const ModuleLibrary& library, Better better) {
    const ResourceVector region = platform.region_resources(Rational(1));
    std::vector<const ModuleVariant*> best;
    for (const auto& task : app.tasks) {
        const ModuleVariant* pick = nullptr;
        for (const auto* v : library.for_task(task.name)) {
            if (!v->usable_for_pr() || !v->resources.fits_within(region)) continue;
            if (pick == nullptr || better(*v, *pick)) pick = v;
        }
        if (pick == nullptr) throw FeasibilityError("", "task '" + task.name + "' has no variant fitting the full region");
        best.push_back(pick);
    }
    return best;
}

}  // namespace

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::Asic: return "asic";
        case Strategy::Pr1: return "pr1";
        case Strategy::Pr2: return "pr2";
        case Strategy::Prk: return "prk";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "asic") return Strategy::Asic;
    if (text == "pr1") return Strategy::Pr1;
    if (text == "pr2") return Strategy::Pr2;
    if (text == "prk") return Strategy::Prk;
    return std::nullopt;
}

ResourceVector VariantAssignment::total_resources() const {
    ResourceVector total;
    for (const auto& v : variants) total += v.resources;
    return total;
}

std::vector<std::string> VariantAssignment::variant_ids() const {
    std::vector<std::string> ids;
    ids.reserve(variants.size());
    for (const auto& v : variants) ids.push_back(v.variant_id);
    return ids;
}

VariantAssignment make_assignment(const Application& app, const ModuleLibrary& library,
                                  const std::map<std::string, std::string>& choice) {
    VariantAssignment a;
    for (const auto& task : app.tasks) {
        auto it = choice.find(task.name);
        if (it == choice.end()) throw PlanError("no variant chosen for task '" + task.name + "'");
        const ModuleVariant* v = library.find(task.name, it->second);
        if (v == nullptr) throw PlanError("unknown variant (" + task.name + ", " + it->second + ")");
        a.variants.push_back(*v);
    }
    for (const auto& [task, id] : choice) {
        auto in_app = std::any_of(app.tasks.begin(), app.tasks.end(), [&](const TaskSpec& t) { return t.name == task; });
        if (!in_app) throw PlanError("variant chosen for task '" + task + "' which is not in the application");
    }
    return a;
}

void check_plan(const ExecutionPlan& plan) {
    require_batch(plan.batch);
    switch (plan.strategy) {
        case Strategy::Asic:
            if (plan.batch != 1) throw PlanError("asic plans take no batch size");
            if (plan.k != 1) throw PlanError("asic plans take no k");
            if (plan.region_fraction) throw PlanError("asic plans take no region fraction");
            break;
        case Strategy::Pr1:
            if (plan.k != 1) throw PlanError("pr1 plans take no k");
            require_fraction(region_fraction(plan), Rational(1), "pr1");
            break;
        case Strategy::Pr2:
            if (plan.batch != 1) throw PlanError("pr2 plans take no batch size");
            if (plan.k != 1 && plan.k != 2) throw PlanError("pr2 plans use exactly two regions");
            require_fraction(region_fraction(plan), Rational(1, 2), "pr2");
            break;
        case Strategy::Prk:
            if (plan.k < 2) throw PlanError("prk plans need k >= 2");
            require_fraction(region_fraction(plan), Rational(1, plan.k), "prk");
            break;
    }
}

void check_feasible(const ExecutionPlan& plan, const Application& app, const Platform& platform) {
    check_plan(plan);
    if (plan.assignment.size() != app.size()) throw PlanError("assignment does not cover the application");
    for (std::size_t i = 0; i < app.size(); ++i) {
        if (plan.assignment.variants[i].task_name != app.tasks[i].name) {
            throw PlanError("assignment order does not match task '" + app.tasks[i].name + "'");
        }
    }
    if (plan.strategy == Strategy::Asic) {
        require_asic_fits(plan.assignment, platform);
    } else {
        require_fits(plan.assignment, platform.region_resources(region_fraction(plan)), "the PR region");
    }
}

Rational region_fraction(const ExecutionPlan& plan) {
    if (plan.strategy == Strategy::Asic) return Rational(0);
    if (plan.region_fraction) return *plan.region_fraction;
    switch (plan.strategy) {
        case Strategy::Pr1: return Rational(1);
        case Strategy::Pr2: return Rational(1, 2);
        case Strategy::Prk: return Rational(1, std::max(plan.k, 1));
        default: return Rational(0);
    }
}

int region_count(const ExecutionPlan& plan) {
    switch (plan.strategy) {
        case Strategy::Asic: return static_cast<int>(plan.assignment.size());
        case Strategy::Pr1: return 1;
        case Strategy::Pr2: return 2;
        case Strategy::Prk: return plan.k;
    }
    return 0;
}

std::string describe(const ExecutionPlan& plan) {
    std::ostringstream out;
    out << to_string(plan.strategy);
    if (plan.strategy == Strategy::Prk) out << " k=" << plan.k;
    if (plan.strategy != Strategy::Asic) out << " f=" << to_exact(region_fraction(plan));
    if (plan.strategy == Strategy::Pr1 || plan.strategy == Strategy::Prk) out << " B=" << plan.batch;
    out << " [";
    for (std::size_t i = 0; i < plan.assignment.variants.size(); ++i) {
        const auto& v = plan.assignment.variants[i];
        out << (i ? " " : "") << v.task_name << ':' << v.variant_id;
    }
    out << ']';
    return out.str();
}

Rational pr_time_ms(const Rational& region_fraction, const Platform& platform) {
    if (region_fraction <= 0 || region_fraction > 1) throw DomainError("region fraction must be in (0, 1]");
    // bytes / (MB/s * 10^6) seconds = bytes / (MB/s * 10^3) ms
    return region_fraction * Rational(platform.bitstream_bytes_full) / (platform.pr_bandwidth_mbps * kMsPerSecond);
}

Rational effective_throughput(const ModuleVariant& variant, const Platform& platform) {
    if (variant.bandwidth_mbps > platform.mem_bandwidth_mbps) {
        return platform.mem_bandwidth_mbps / variant.bandwidth_mbps * variant.throughput_fps;
    }
    return variant.throughput_fps;
}

Rational asic_latency(const VariantAssignment& assignment, const Platform& platform) {
    require_asic_fits(assignment, platform);
    Rational total;
    for (const auto& v : assignment.variants) total += v.latency_ms;
    return total;
}

Rational asic_throughput(const VariantAssignment& assignment, const Platform& platform) {
    require_asic_fits(assignment, platform);
    if (assignment.variants.empty()) return Rational(0);
    Rational lowest = effective_throughput(assignment.variants.front(), platform);
    for (const auto& v : assignment.variants) lowest = rational_min(lowest, effective_throughput(v, platform));
    return lowest;
}

Rational pr1_latency_bound(const Application& app, const Platform& platform, const ModuleLibrary& library) {
    auto best = best_full_area(app, platform, library, [](const ModuleVariant& a, const ModuleVariant& b) {
        return a.latency_ms < b.latency_ms;
    });
    Rational total;
    for (const auto* v : best) total += v->latency_ms;
    return total;
}

Rational pr1_throughput_bound(const Application& app, const Platform& platform, const ModuleLibrary& library) {
    auto best = best_full_area(app, platform, library, [&](const ModuleVariant& a, const ModuleVariant& b) {
        return effective_throughput(a, platform) > effective_throughput(b, platform);
    });
    if (best.empty()) return Rational(0);
    Rational inverse_sum;
    for (const auto* v : best) inverse_sum += Rational(1) / effective_throughput(*v, platform);
    return Rational(1) / inverse_sum;
}

Rational pr1_latency(const VariantAssignment& assignment, const Platform& platform, const Rational& region_fraction) {
    require_fraction(region_fraction, Rational(1), "pr1");
    require_fits(assignment, platform.region_resources(region_fraction), "the PR region");
    Rational total;
    for (const auto& v : assignment.variants) total += v.latency_ms;
    return total + Rational(static_cast<long long>(assignment.size())) * pr_time_ms(region_fraction, platform);
}

Rational pr1_throughput(const Application& app, const VariantAssignment& assignment, const Platform& platform,
                        int batch, const Rational& region_fraction) {
    require_batch(batch);
    require_fraction(region_fraction, Rational(1), "pr1");
    require_fits(assignment, platform.region_resources(region_fraction), "the PR region");
    const std::uint64_t needed = buffer_requirement(app, assignment, batch);
    if (needed > platform.buffer_capacity_bytes) throw CapacityError(needed, platform.buffer_capacity_bytes);
    if (assignment.variants.empty()) return Rational(0);

    // B / (sum_i B/T_i + N * PR), in seconds.
    const Rational b(batch);
    Rational period_s;
    for (const auto& v : assignment.variants) period_s += b / effective_throughput(v, platform);
    period_s += Rational(static_cast<long long>(assignment.size())) * pr_time_ms(region_fraction, platform) / kMsPerSecond;
    return b / period_s;
}

Rational pr2_latency(const VariantAssignment& assignment, const Platform& platform, const Rational& region_fraction) {
    require_fraction(region_fraction, Rational(1, 2), "pr2");
    require_fits(assignment, platform.region_resources(region_fraction), "the half-size PR region");
    if (assignment.variants.empty()) return Rational(0);
    const Rational pr = pr_time_ms(region_fraction, platform);
    Rational total = pr;  // initial load of the first module
    for (const auto& v : assignment.variants) total += rational_max(pr, v.latency_ms);
    return total;
}

Rational pr2_throughput(const VariantAssignment& assignment, const Platform& platform, const Rational& region_fraction) {
    require_fraction(region_fraction, Rational(1, 2), "pr2");
    require_fits(assignment, platform.region_resources(region_fraction), "the half-size PR region");
    if (assignment.variants.empty()) return Rational(0);
    const Rational pr = pr_time_ms(region_fraction, platform);
    Rational period_ms;
    for (const auto& v : assignment.variants) period_ms += rational_max(pr, run_interval_ms(v, platform));
    return kMsPerSecond / period_ms;
}

Rational prk_throughput(const Application& app, const VariantAssignment& assignment, const Platform& platform, int k,
                        int batch, std::optional<Rational> region_fraction) {
    if (k < 1) throw DomainError("k must be >= 1");
    const Rational fraction = region_fraction.value_or(Rational(1, k));
    require_fraction(fraction, Rational(1, k), "prk");
    const std::uint64_t needed = static_cast<std::uint64_t>(k) * buffer_requirement(app, assignment, batch);
    if (needed > platform.buffer_capacity_bytes) throw CapacityError(needed, platform.buffer_capacity_bytes);

    Platform unlimited = platform;
    unlimited.buffer_capacity_bytes = std::numeric_limits<std::uint64_t>::max();
    return Rational(k) * pr1_throughput(app, assignment, unlimited, batch, fraction);
}

std::uint64_t buffer_requirement(const Application& app, const VariantAssignment& /*assignment*/, int batch) {
    require_batch(batch);
    std::uint64_t per_run = 0;
    for (const auto& task : app.tasks) per_run += task.input_bytes;
    return per_run * static_cast<std::uint64_t>(batch);
}

Density bottleneck_of(const ResourceVector& used, const Platform& platform) {
    Density d;
    bool found = false;
    for (Resource r : kAllResources) {
        if (platform.budget[r] <= 0) continue;
        Rational ratio = used[r] / platform.budget[r];
        if (!found || ratio > d.utilization) {
            d.bottleneck = r;
            d.used = used[r];
            d.utilization = ratio;
            found = true;
        }
    }
    return d;
}

Density performance_density(const Rational& rate_per_second, const ResourceVector& used, const Platform& platform) {
    if (used.lut == 0 && used.bram36 == 0 && used.dsp == 0) throw DomainError("resource usage is zero everywhere");
    Density d = bottleneck_of(used, platform);
    if (d.used == 0) throw DomainError("bottleneck resource usage is zero");
    d.value = rate_per_second / d.used;
    return d;
}

ResourceVector footprint(const ExecutionPlan& plan, const Platform& platform) {
    switch (plan.strategy) {
        case Strategy::Asic: return plan.assignment.total_resources();
        case Strategy::Pr1: return platform.region_resources(region_fraction(plan));
        case Strategy::Pr2:
        case Strategy::Prk:
            return Rational(region_count(plan)) * platform.region_resources(region_fraction(plan));
    }
    return {};
}

PerformanceEstimate estimate(const ExecutionPlan& plan, const Application& app, const Platform& platform) {
    check_feasible(plan, app, platform);

    PerformanceEstimate e;
    const Rational fraction = region_fraction(plan);
    Rational peak_bw;
    for (const auto& v : plan.assignment.variants) peak_bw = rational_max(peak_bw, v.bandwidth_mbps);

    switch (plan.strategy) {
        case Strategy::Asic: {
            e.latency_ms = asic_latency(plan.assignment, platform);
            e.throughput_fps = asic_throughput(plan.assignment, platform);
            e.buffer_bytes = buffer_requirement(app, plan.assignment, 1);
            Rational sum_bw;
            for (const auto& v : plan.assignment.variants) sum_bw += v.bandwidth_mbps;
            e.bandwidth_peak_mbps = sum_bw;
            break;
        }
        case Strategy::Pr1:
            e.latency_ms = pr1_latency(plan.assignment, platform, fraction);
            e.throughput_fps = pr1_throughput(app, plan.assignment, platform, plan.batch, fraction);
            e.buffer_bytes = buffer_requirement(app, plan.assignment, plan.batch);
            e.pr_time_per_region_ms = pr_time_ms(fraction, platform);
            e.bandwidth_peak_mbps = peak_bw;
            break;
        case Strategy::Pr2:
            e.latency_ms = pr2_latency(plan.assignment, platform, fraction);
            e.throughput_fps = pr2_throughput(plan.assignment, platform, fraction);
            e.buffer_bytes = buffer_requirement(app, plan.assignment, 1);
            e.pr_time_per_region_ms = pr_time_ms(fraction, platform);
            e.bandwidth_peak_mbps = peak_bw;
            break;
        case Strategy::Prk: {
            // Each region runs the serialized schedule; a frame's latency is one region's.
            e.latency_ms = pr1_latency(plan.assignment, platform, fraction);
            e.throughput_fps = prk_throughput(app, plan.assignment, platform, plan.k, plan.batch, fraction);
            e.buffer_bytes = static_cast<std::uint64_t>(plan.k) * buffer_requirement(app, plan.assignment, plan.batch);
            e.pr_time_per_region_ms = pr_time_ms(fraction, platform);
            e.bandwidth_peak_mbps = Rational(plan.k) * peak_bw;
            break;
        }
    }

    e.footprint = footprint(plan, platform);
    const Density by_tput = performance_density(e.throughput_fps, e.footprint, platform);
    e.bottleneck = by_tput.bottleneck;
    e.bottleneck_used = by_tput.used;
    e.utilization = by_tput.utilization;
    e.throughput_density = by_tput.value;
    if (e.latency_ms > 0) {
        e.latency_density = performance_density(kMsPerSecond / e.latency_ms, e.footprint, platform).value;
    }
    return e;
}

}  // namespace prfront
