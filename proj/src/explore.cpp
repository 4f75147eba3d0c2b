#include "prfront/explore.hpp"

#include "prfront/error.hpp"

#include <algorithm>
#include <set>

namespace prfront {

std::string_view to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::MaxTGivenA: return "max-t";
        case ProblemKind::MinLGivenA: return "min-l";
        case ProblemKind::GivenLMinA: return "given-l";
    }
    return "?";
}

void check_problem(const Problem& problem) {
    const bool needs_bound = problem.kind == ProblemKind::GivenLMinA;
    if (needs_bound && !problem.latency_bound_ms) throw PlanError("given-l problems need a latency bound");
    if (!needs_bound && problem.latency_bound_ms) throw PlanError("a latency bound only applies to given-l problems");
    if (problem.latency_bound_ms && *problem.latency_bound_ms <= 0) throw DomainError("latency bound must be > 0");
    if (problem.k_max < 2) throw PlanError("k_max must be >= 2");
    if (problem.batch_candidates.empty()) throw PlanError("no batch candidates");
    for (int b : problem.batch_candidates) {
        if (b < 1) throw DomainError("batch candidates must be >= 1");
    }
}

namespace {

bool is_throughput_problem(const Problem& p) { return p.kind == ProblemKind::MaxTGivenA; }

/// One region sizing / strategy combination to enumerate assignments for.
struct Config {
    Strategy strategy;
    int k = 1;
    std::optional<Rational> fraction;
    std::vector<int> batches;
};

struct Failure {
    Rational excess;  // how far past the constraint; smaller is tighter
    std::string message;
};

std::vector<Config> configs_for(const Problem& problem, const Platform& platform) {
    std::vector<int> batches = problem.batch_candidates;
    std::sort(batches.begin(), batches.end());
    batches.erase(std::unique(batches.begin(), batches.end()), batches.end());

    const bool throughput = is_throughput_problem(problem);
    std::vector<Config> out;
    out.push_back({Strategy::Asic, 1, std::nullopt, {1}});

    std::set<Rational> fractions{Rational(1)};
    for (int j = 2; j <= problem.k_max; ++j) fractions.insert(Rational(1, j));
    for (const auto& shape : platform.regions) fractions.insert(shape.fraction);
    for (auto it = fractions.rbegin(); it != fractions.rend(); ++it) {
        std::optional<Rational> f;
        if (*it != 1) f = *it;
        out.push_back({Strategy::Pr1, 1, f, throughput ? batches : std::vector<int>{1}});
    }

    if (throughput) {
        for (int k = 2; k <= problem.k_max; ++k) out.push_back({Strategy::Prk, k, std::nullopt, batches});
    } else {
        out.push_back({Strategy::Pr2, 1, std::nullopt, {1}});
    }
    return out;
}

Rational config_fraction(const Config& c) {
    if (c.fraction) return *c.fraction;
    switch (c.strategy) {
        case Strategy::Pr1: return Rational(1);
        case Strategy::Pr2: return Rational(1, 2);
        case Strategy::Prk: return Rational(1, c.k);
        default: return Rational(0);
    }
}

/// True when `a` is no worse than `b` on every attribute that can influence a
/// plan's feasibility or rank under this configuration.
bool weakly_better(const Config& c, const Problem& problem, const ModuleVariant& a, const ModuleVariant& b,
                   const Platform& platform) {
    if (a.resources.lut > b.resources.lut) return false;
    if (c.strategy == Strategy::Asic) {
        if (a.resources.bram36 > b.resources.bram36 || a.resources.dsp > b.resources.dsp) return false;
        return a.latency_ms <= b.latency_ms && effective_throughput(a, platform) >= effective_throughput(b, platform);
    }
    if (is_throughput_problem(problem)) return effective_throughput(a, platform) >= effective_throughput(b, platform);
    return a.latency_ms <= b.latency_ms;
}

std::string overshoot_message(const ModuleVariant& v, const ResourceVector& capacity, Rational& excess) {
    excess = Rational(0);
    Resource worst = Resource::Lut;
    for (Resource r : kAllResources) {
        if (capacity[r] == 0) {
            if (v.resources[r] > 0 && excess < 1000000) {
                excess = Rational(1000000);
                worst = r;
            }
            continue;
        }
        Rational ratio = v.resources[r] / capacity[r];
        if (ratio > excess) {
            excess = ratio;
            worst = r;
        }
    }
    return "(" + v.task_name + ", " + v.variant_id + ") needs " + to_exact(v.resources[worst]) + " " +
           std::string(to_string(worst)) + ", has " + to_exact(capacity[worst]);
}

class Explorer {
public:
    Explorer(const Problem& problem, const Application& app, const ModuleLibrary& library, const Platform& platform,
             bool prune)
        : problem_(problem), app_(app), library_(library), platform_(platform), prune_(prune) {}

    ExplorationResult run() {
        check_problem(problem_);
        if (app_.tasks.empty()) throw PlanError("application has no tasks");
        const auto configs = configs_for(problem_, platform_);

        std::vector<std::vector<std::vector<const ModuleVariant*>>> candidates;
        long double evaluations = 0;
        for (const auto& c : configs) {
            candidates.push_back(candidates_for(c));
            long double product = static_cast<long double>(c.batches.size());
            for (const auto& list : candidates.back()) product *= static_cast<long double>(list.size());
            evaluations += product;
        }
        if (!prune_ && evaluations > static_cast<long double>(kExhaustiveGuard)) {
            throw GuardError("exhaustive search would evaluate " + std::to_string(static_cast<long long>(evaluations)) +
                             " plans, above the guard of " + std::to_string(kExhaustiveGuard));
        }

        for (std::size_t i = 0; i < configs.size(); ++i) enumerate(configs[i], candidates[i]);

        ExplorationResult result;
        auto before = [&](const RankedPlan& a, const RankedPlan& b) { return ranks_before(problem_, a, b); };
        std::sort(plans_.begin(), plans_.end(), before);
        result.ranked = std::move(plans_);
        for (const auto& rp : result.ranked) result.best_per_strategy.try_emplace(rp.plan.strategy, rp);

        for (Strategy s : {Strategy::Asic, Strategy::Pr1, Strategy::Pr2, Strategy::Prk}) {
            if (result.best_per_strategy.count(s)) continue;
            const bool applicable = is_throughput_problem(problem_) ? s != Strategy::Pr2 : s != Strategy::Prk;
            if (!applicable) {
                result.infeasible[s] = "strategy not applicable per model";
            } else if (auto it = failures_.find(s); it != failures_.end()) {
                result.infeasible[s] = it->second.message;
            } else {
                result.infeasible[s] = "no candidate plan";
            }
        }
        result.pareto = build_front(result.ranked);
        return result;
    }

private:
    std::vector<std::vector<const ModuleVariant*>> candidates_for(const Config& c) {
        const bool asic = c.strategy == Strategy::Asic;
        const ResourceVector capacity = asic ? platform_.budget : platform_.region_resources(config_fraction(c));
        std::vector<std::vector<const ModuleVariant*>> per_task;
        for (const auto& task : app_.tasks) {
            std::vector<const ModuleVariant*> fitting;
            std::optional<Failure> tightest;
            for (const auto* v : library_.for_task(task.name)) {
                if (asic ? !v->usable_for_asic() : !v->usable_for_pr()) continue;
                if (v->resources.fits_within(capacity)) {
                    fitting.push_back(v);
                } else {
                    Failure f;
                    f.message = overshoot_message(*v, capacity, f.excess);
                    if (!tightest || f.excess < tightest->excess) tightest = f;
                }
            }
            if (fitting.empty()) {
                Failure f = tightest.value_or(Failure{Rational(1000000), ""});
                f.message = "task '" + task.name + "' has no " + (asic ? "ASIC-style" : "PR-capable") +
                            " variant fitting " + (asic ? "the budget" : "a region of fraction " + to_exact(config_fraction(c))) +
                            (f.message.empty() ? "" : ": " + f.message);
                note_failure(c.strategy, f);
                return {};
            }
            if (prune_) fitting = prune(c, fitting);
            per_task.push_back(std::move(fitting));
        }
        return per_task;
    }

    std::vector<const ModuleVariant*> prune(const Config& c, const std::vector<const ModuleVariant*>& list) const {
        std::vector<const ModuleVariant*> kept;
        for (const auto* v : list) {
            const bool dominated = std::any_of(list.begin(), list.end(), [&](const ModuleVariant* u) {
                return u != v && u->variant_id < v->variant_id && weakly_better(c, problem_, *u, *v, platform_);
            });
            if (!dominated) kept.push_back(v);
        }
        return kept;
    }

    void note_failure(Strategy s, const Failure& f) {
        auto it = failures_.find(s);
        if (it == failures_.end() || f.excess < it->second.excess) failures_[s] = f;
    }

    void enumerate(const Config& c, const std::vector<std::vector<const ModuleVariant*>>& per_task) {
        if (per_task.size() != app_.size()) return;
        std::vector<std::size_t> index(per_task.size(), 0);
        while (true) {
            ExecutionPlan plan;
            plan.strategy = c.strategy;
            plan.k = c.strategy == Strategy::Prk ? c.k : 1;
            plan.region_fraction = c.fraction;
            for (std::size_t t = 0; t < per_task.size(); ++t) plan.assignment.variants.push_back(*per_task[t][index[t]]);
            for (int b : c.batches) {
                plan.batch = b;
                evaluate(plan);
            }

            std::size_t t = 0;
            while (t < index.size() && ++index[t] == per_task[t].size()) index[t++] = 0;
            if (t == index.size()) break;
        }
    }

    void evaluate(const ExecutionPlan& plan) {
        try {
            PerformanceEstimate e = estimate(plan, app_, platform_);
            if (problem_.kind == ProblemKind::GivenLMinA && e.latency_ms > *problem_.latency_bound_ms) {
                note_failure(plan.strategy, {e.latency_ms / *problem_.latency_bound_ms,
                                             "best latency " + to_fixed(e.latency_ms, 3) + " ms exceeds the bound of " +
                                                 to_fixed(*problem_.latency_bound_ms, 3) + " ms"});
                return;
            }
            plans_.push_back({plan, std::move(e)});
        } catch (const FeasibilityError& err) {
            note_failure(plan.strategy, {asic_excess(plan), err.what()});
        } catch (const CapacityError& err) {
            note_failure(plan.strategy, {Rational(static_cast<long long>(err.required())) /
                                             Rational(static_cast<long long>(std::max<unsigned long long>(err.available(), 1))),
                                         err.what()});
        }
    }

    Rational asic_excess(const ExecutionPlan& plan) const {
        const ResourceVector total = plan.assignment.total_resources();
        Rational worst;
        for (Resource r : kAllResources) {
            if (platform_.budget[r] > 0) worst = rational_max(worst, total[r] / platform_.budget[r]);
        }
        return worst;
    }

    ParetoFront build_front(const std::vector<RankedPlan>& ranked) const {
        const bool higher_is_better = is_throughput_problem(problem_);
        auto perf = [&](const RankedPlan& rp) {
            return higher_is_better ? rp.estimate.throughput_fps : rp.estimate.latency_ms;
        };
        auto better = [&](const Rational& a, const Rational& b) { return higher_is_better ? a > b : a < b; };

        auto sweep = [&](auto include) {
            std::vector<const RankedPlan*> order;
            for (const auto& rp : ranked) {
                if (include(rp)) order.push_back(&rp);
            }
            // Rank order is preserved among equal (utilization, performance) points.
            std::stable_sort(order.begin(), order.end(), [&](const RankedPlan* a, const RankedPlan* b) {
                if (a->estimate.utilization != b->estimate.utilization) {
                    return a->estimate.utilization < b->estimate.utilization;
                }
                return better(perf(*a), perf(*b));
            });
            std::vector<ParetoPoint> front;
            std::optional<Rational> best_so_far;
            for (const auto* rp : order) {
                const Rational p = perf(*rp);
                if (best_so_far && !better(p, *best_so_far)) continue;
                best_so_far = p;
                front.push_back({rp->plan.strategy, rp->plan.strategy == Strategy::Asic, rp->estimate.bottleneck,
                                 rp->estimate.bottleneck_used, rp->estimate.utilization, p, describe(rp->plan)});
            }
            return front;
        };

        ParetoFront f;
        f.combined = sweep([](const RankedPlan&) { return true; });
        f.asic = sweep([](const RankedPlan& rp) { return rp.plan.strategy == Strategy::Asic; });
        f.pr = sweep([](const RankedPlan& rp) { return rp.plan.strategy != Strategy::Asic; });
        return f;
    }

    const Problem& problem_;
    const Application& app_;
    const ModuleLibrary& library_;
    const Platform& platform_;
    bool prune_;
    std::vector<RankedPlan> plans_;
    std::map<Strategy, Failure> failures_;
};

Rational total_lut(const ExecutionPlan& plan) {
    return plan.assignment.total_resources().lut;
}

}  // namespace

bool ranks_before(const Problem& problem, const RankedPlan& a, const RankedPlan& b) {
    const auto& ea = a.estimate;
    const auto& eb = b.estimate;
    switch (problem.kind) {
        case ProblemKind::MaxTGivenA:
            if (ea.throughput_fps != eb.throughput_fps) return ea.throughput_fps > eb.throughput_fps;
            break;
        case ProblemKind::MinLGivenA:
            if (ea.latency_ms != eb.latency_ms) return ea.latency_ms < eb.latency_ms;
            break;
        case ProblemKind::GivenLMinA:
            break;  // the objective is the utilization key below
    }
    if (ea.utilization != eb.utilization) return ea.utilization < eb.utilization;
    const Rational la = total_lut(a.plan);
    const Rational lb = total_lut(b.plan);
    if (la != lb) return la < lb;
    if (a.plan.strategy != b.plan.strategy) return to_string(a.plan.strategy) < to_string(b.plan.strategy);
    const auto ids_a = a.plan.assignment.variant_ids();
    const auto ids_b = b.plan.assignment.variant_ids();
    if (ids_a != ids_b) return ids_a < ids_b;
    if (a.plan.batch != b.plan.batch) return a.plan.batch < b.plan.batch;
    if (a.plan.k != b.plan.k) return a.plan.k < b.plan.k;
    return region_fraction(a.plan) < region_fraction(b.plan);
}

ExplorationResult solve(const Problem& problem, const Application& app, const ModuleLibrary& library,
                        const Platform& platform) {
    return Explorer(problem, app, library, platform, true).run();
}

ExplorationResult solve_exhaustive(const Problem& problem, const Application& app, const ModuleLibrary& library,
                                   const Platform& platform) {
    return Explorer(problem, app, library, platform, false).run();
}

ParetoFront pareto_front(const Application& app, const ModuleLibrary& library, const Platform& platform,
                         const Problem& objective) {
    return solve(objective, app, library, platform).pareto;
}

}  // namespace prfront
