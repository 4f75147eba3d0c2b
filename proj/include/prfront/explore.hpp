#pragma once

// Design-space exploration over variant assignments and execution strategies.

#include "prfront/charlib.hpp"
#include "prfront/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prfront {

enum class ProblemKind { MaxTGivenA, MinLGivenA, GivenLMinA };

std::string_view to_string(ProblemKind k);

struct Problem {
    ProblemKind kind = ProblemKind::MinLGivenA;
    std::optional<Rational> latency_bound_ms;  // GivenLMinA only
    std::vector<int> batch_candidates{1, 2, 4, 8, 16, 32, 64};
    int k_max = 2;
};

/// Throws PlanError when the latency bound is missing or superfluous, or the
/// candidates are malformed.
void check_problem(const Problem& problem);

struct RankedPlan {
    ExecutionPlan plan;
    PerformanceEstimate estimate;
};

struct ParetoPoint {
    Strategy strategy = Strategy::Asic;
    bool asic_style = true;
    Resource bottleneck = Resource::Bram36;
    Rational resource_used;  // count of the bottleneck resource
    Rational utilization;    // used / budget; the dominance axis
    Rational performance;    // fps for MaxT, ms otherwise
    std::string plan;        // describe(plan)
};

struct ParetoFront {
    std::vector<ParetoPoint> combined;  // all styles together
    std::vector<ParetoPoint> asic;      // ASIC-style plans only
    std::vector<ParetoPoint> pr;        // PR-style plans only
};

struct ExplorationResult {
    std::vector<RankedPlan> ranked;                  // best first
    std::map<Strategy, RankedPlan> best_per_strategy;
    std::map<Strategy, std::string> infeasible;      // reason per strategy with no feasible plan
    ParetoFront pareto;

    bool feasible() const { return !ranked.empty(); }
    const RankedPlan& best() const { return ranked.front(); }
};

/// Enumerates assignments per strategy with dominance pruning and ranks feasible plans.
ExplorationResult solve(const Problem& problem, const Application& app, const ModuleLibrary& library,
                        const Platform& platform);

/// Same contract as solve() with no pruning. Refuses (GuardError) instances whose
/// enumeration exceeds `kExhaustiveGuard` evaluations.
ExplorationResult solve_exhaustive(const Problem& problem, const Application& app, const ModuleLibrary& library,
                                   const Platform& platform);

inline constexpr long long kExhaustiveGuard = 1'000'000;

/// Non-dominated (utilization, performance) points for the problem's objective,
/// tagged by style.
ParetoFront pareto_front(const Application& app, const ModuleLibrary& library, const Platform& platform,
                         const Problem& objective);

/// Strict total order used for ranking: true when `a` ranks before `b`.
bool ranks_before(const Problem& problem, const RankedPlan& a, const RankedPlan& b);

}  // namespace prfront
