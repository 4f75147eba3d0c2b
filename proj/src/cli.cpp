#include "prfront/cli.hpp"

#include "prfront/error.hpp"
#include "prfront/explore.hpp"
#include "prfront/gantt.hpp"
#include "prfront/model.hpp"
#include "prfront/report.hpp"
#include "prfront/sim.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace prfront::cli {

namespace {

/// Raised for flag combinations CLI11 cannot express; maps to the usage exit code.
struct UsageError : Error {
    using Error::Error;
};

/// Infeasible plan or problem that was not signalled by an exception.
struct InfeasibleError : Error {
    using Error::Error;
};

struct Options {
    std::vector<std::string> libraries;
    std::string app;
    std::string platform;
    std::string data_dir = default_data_dir();
    std::string problem;
    std::string latency_bound;
    std::string strategy;
    std::vector<std::string> variants;
    std::string region_fraction;
    int k = 0;
    int batch = 0;
    long horizon = 0;
    int top = 10;
    std::string out_csv;
    std::string out_svg;
    std::string pareto;
    bool asic_pipelined = false;
    bool contention = false;
};

struct Inputs {
    ModuleLibrary library;
    Application app;
    Platform platform;
};

std::string fmt3(const Rational& r) { return to_fixed(r, 3); }
std::string fmt6(const Rational& r) { return to_fixed(r, 6); }

Rational parse_number(const std::string& flag, const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw UsageError(flag + ": not a number: '" + text + "'");
    }
}

Inputs load_inputs(const Options& o, std::ostream& err) {
    if (o.libraries.empty()) throw UsageError("--library is required");
    if (o.app.empty()) throw UsageError("--app is required");
    if (o.platform.empty()) throw UsageError("--platform is required");

    Inputs in;
    for (const auto& path : o.libraries) {
        try {
            in.library.merge(parse_library(read_file(path)));
        } catch (const ParseError& e) {
            throw ParseError(0, path + ": " + e.what());
        }
    }
    try {
        in.app = parse_application(read_file(o.app));
    } catch (const ParseError& e) {
        throw ParseError(0, o.app + ": " + e.what());
    }
    try {
        in.platform = parse_platform(read_file(o.platform));
    } catch (const ParseError& e) {
        throw ParseError(0, o.platform + ": " + e.what());
    }

    const ValidationReport report = validate(in.library, in.app, in.platform);
    bool invalid = false;
    bool unfit = false;
    for (const auto& f : report.findings) {
        if (f.severity == Severity::Info) continue;
        err << to_string(f.severity) << ": " << f.code << ": " << f.message << "\n";
        if (f.severity == Severity::Fatal) {
            if (f.code == "task-unfit") {
                unfit = true;
            } else {
                invalid = true;
            }
        }
    }
    if (invalid) throw ParseError(0, "validation failed");
    if (unfit) throw InfeasibleError("a task has no variant fitting the budget");
    return in;
}

Strategy strategy_of(const Options& o) {
    if (o.strategy.empty()) throw UsageError("--strategy is required");
    auto s = parse_strategy(o.strategy);
    if (!s) throw UsageError("--strategy: unknown strategy '" + o.strategy + "'");
    return *s;
}

/// Explicit `--variant task=id` choices; other tasks take the first library variant
/// usable in the strategy's style that fits its region (or the budget).
ExecutionPlan plan_of(const Options& o, const Inputs& in) {
    ExecutionPlan plan;
    plan.strategy = strategy_of(o);
    plan.batch = o.batch > 0 ? o.batch : 1;
    plan.k = o.k > 0 ? o.k : (plan.strategy == Strategy::Prk ? 2 : 1);
    if (!o.region_fraction.empty()) plan.region_fraction = parse_number("--region-fraction", o.region_fraction);
    check_plan(plan);

    std::map<std::string, std::string> choice;
    for (const auto& v : o.variants) {
        const auto eq = v.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == v.size()) {
            throw UsageError("--variant expects task=id, got '" + v + "'");
        }
        choice[v.substr(0, eq)] = v.substr(eq + 1);
    }
    const bool asic = plan.strategy == Strategy::Asic;
    const ResourceVector capacity = asic ? in.platform.budget : in.platform.region_resources(region_fraction(plan));
    for (const auto& task : in.app.tasks) {
        if (choice.count(task.name)) continue;
        for (const auto* v : in.library.for_task(task.name)) {
            if ((asic ? v->usable_for_asic() : v->usable_for_pr()) && v->resources.fits_within(capacity)) {
                choice[task.name] = v->variant_id;
                break;
            }
        }
        if (!choice.count(task.name)) {
            throw InfeasibleError("task '" + task.name + "' has no " + std::string(asic ? "ASIC-style" : "PR-capable") +
                                  " variant fitting " + (asic ? "the budget" : "the region"));
        }
    }
    plan.assignment = make_assignment(in.app, in.library, choice);
    return plan;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << content;
    if (!f) throw Error("cannot write " + path);
}

void print_estimate(std::ostream& out, const ExecutionPlan& plan, const PerformanceEstimate& e) {
    auto row = [&](const std::string& key, const std::string& value) { out << fmt::format("{:<22} {}\n", key, value); };
    row("plan", describe(plan));
    row("latency_ms", fmt3(e.latency_ms));
    row("throughput_fps", fmt3(e.throughput_fps));
    row("buffer_bytes", std::to_string(e.buffer_bytes));
    row("pr_time_ms", fmt3(e.pr_time_per_region_ms));
    row("bandwidth_peak_mbps", fmt3(e.bandwidth_peak_mbps));
    row("footprint", fmt::format("lut {} bram36 {} dsp {}", to_fixed(e.footprint.lut, 0), to_fixed(e.footprint.bram36, 1),
                                 to_fixed(e.footprint.dsp, 0)));
    row("bottleneck", fmt::format("{} {} ({}%)", to_string(e.bottleneck), to_fixed(e.bottleneck_used, 1),
                                  to_fixed(e.utilization * 100, 1)));
    row("throughput_density", fmt3(e.throughput_density) + " fps/" + std::string(to_string(e.bottleneck)));
    row("latency_density", fmt3(e.latency_density) + " 1/s/" + std::string(to_string(e.bottleneck)));
}

int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err) {
    const Inputs in = load_inputs(o, err);
    const ExecutionPlan plan = plan_of(o, in);
    print_estimate(out, plan, estimate(plan, in.app, in.platform));
    return kExitOk;
}

Problem problem_of(const Options& o) {
    Problem p;
    if (o.problem == "max-t") {
        p.kind = ProblemKind::MaxTGivenA;
    } else if (o.problem == "min-l") {
        p.kind = ProblemKind::MinLGivenA;
    } else if (o.problem == "given-l") {
        p.kind = ProblemKind::GivenLMinA;
    } else {
        throw UsageError("--problem must be one of max-t, min-l, given-l");
    }
    if (!o.latency_bound.empty()) p.latency_bound_ms = parse_number("--latency-bound", o.latency_bound);
    if (p.kind == ProblemKind::GivenLMinA && !p.latency_bound_ms) throw UsageError("given-l needs --latency-bound");
    if (p.kind != ProblemKind::GivenLMinA && p.latency_bound_ms) {
        throw UsageError("--latency-bound only applies to given-l");
    }
    if (o.k > 0) p.k_max = o.k;
    if (o.batch > 0) p.batch_candidates = {o.batch};
    check_problem(p);
    return p;
}

int cmd_explore(const Options& o, std::ostream& out, std::ostream& err) {
    const Problem problem = problem_of(o);
    const Inputs in = load_inputs(o, err);
    const ExplorationResult r = solve(problem, in.app, in.library, in.platform);

    out << fmt::format("problem {} on {} ({} feasible plans)\n", to_string(problem.kind), in.app.name, r.ranked.size());
    out << fmt::format("{:>4} {:<44} {:>11} {:>14} {:>8}\n", "rank", "plan", "latency_ms", "throughput_fps", "util_%");
    const std::size_t shown = std::min<std::size_t>(r.ranked.size(), static_cast<std::size_t>(std::max(o.top, 0)));
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& rp = r.ranked[i];
        out << fmt::format("{:>4} {:<44} {:>11} {:>14} {:>8}\n", i + 1, describe(rp.plan), fmt3(rp.estimate.latency_ms),
                           fmt3(rp.estimate.throughput_fps), to_fixed(rp.estimate.utilization * 100, 1));
    }
    for (const auto& [strategy, reason] : r.infeasible) {
        out << fmt::format("{} infeasible: {}\n", to_string(strategy), reason);
    }

    if (!o.pareto.empty()) {
        std::string csv = "style,strategy,bottleneck,resource_used,utilization,performance,plan\n";
        auto emit = [&](const char* style, const std::vector<ParetoPoint>& points) {
            for (const auto& p : points) {
                csv += fmt::format("{},{},{},{},{},{},\"{}\"\n", style, to_string(p.strategy), to_string(p.bottleneck),
                                   fmt6(p.resource_used), fmt6(p.utilization), fmt6(p.performance), p.plan);
            }
        };
        emit("asic", r.pareto.asic);
        emit("pr", r.pareto.pr);
        write_file(o.pareto, csv);
    }
    if (!r.feasible()) throw InfeasibleError("no feasible plan under any strategy");
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const Inputs in = load_inputs(o, err);
    const ExecutionPlan plan = plan_of(o, in);
    const long horizon = o.horizon > 0 ? o.horizon : 10L * plan.batch * plan.k;
    SimOptions options;
    options.asic_pipelined = o.asic_pipelined;
    options.bandwidth_contention = o.contention;
    const SimResult sim = simulate(plan, in.app, in.platform, horizon, options);

    out << fmt::format("{:<22} {}\n", "plan", describe(plan));
    out << fmt::format("{:<22} {}\n", "horizon_runs", horizon);
    if (!o.out_csv.empty()) write_file(o.out_csv, timeline_csv(sim.timeline));
    if (!o.out_svg.empty()) write_file(o.out_svg, render_gantt(sim.timeline));
    if (sim.blocked) throw InfeasibleError("simulation blocked: " + sim.blocked_reason);

    out << fmt::format("{:<22} {}\n", "first_run_latency_ms", fmt3(sim.first_run_latency_ms));
    out << fmt::format("{:<22} {}\n", "steady_throughput_fps", fmt3(sim.steady_throughput_fps));
    out << fmt::format("{:<22} {}\n", "makespan_ms", fmt3(sim.makespan_ms));
    out << fmt::format("{:<22} {}\n", "peak_buffer_bytes", sim.peak_buffer_bytes);
    for (std::size_t r = 0; r < sim.busy_fraction.size(); ++r) {
        out << fmt::format("{:<22} {}\n", fmt::format("busy_region_{}", r), fmt3(sim.busy_fraction[r]));
    }
    try {
        const PerformanceEstimate e = estimate(plan, in.app, in.platform);
        const DeltaReport d = compare(sim, e);
        out << fmt::format("{:<22} {} ({}%)\n", "latency_delta_ms", fmt3(d.latency_abs_ms), to_fixed(d.latency_rel * 100, 3));
        out << fmt::format("{:<22} {} ({}%)\n", "throughput_delta_fps", fmt3(d.throughput_abs_fps),
                           to_fixed(d.throughput_rel * 100, 3));
    } catch (const CapacityError&) {
        // simulation ran without the batch buffers fitting; the blocked flag above covers this
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Area-time design-space exploration for partially reconfigurable FPGA designs", "prfront"};
    app.require_subcommand(1);

    auto add_inputs = [&](CLI::App* sub) {
        sub->add_option("--library", o.libraries, "module library file (repeatable)");
        sub->add_option("--app", o.app, "application file");
        sub->add_option("--platform", o.platform, "platform file");
    };
    auto add_plan = [&](CLI::App* sub) {
        sub->add_option("--strategy", o.strategy, "asic, pr1, pr2 or prk");
        sub->add_option("--variant", o.variants, "task=id variant choice (repeatable)");
        sub->add_option("--region-fraction", o.region_fraction, "region size as a fraction of the fabric");
        sub->add_option("--k", o.k, "region count for prk");
        sub->add_option("--batch", o.batch, "runs per residency");
    };

    auto* estimate_cmd = app.add_subcommand("estimate", "model estimate for an explicit plan");
    add_inputs(estimate_cmd);
    add_plan(estimate_cmd);

    auto* explore_cmd = app.add_subcommand("explore", "rank plans for a design problem");
    add_inputs(explore_cmd);
    explore_cmd->add_option("--problem", o.problem, "max-t, min-l or given-l");
    explore_cmd->add_option("--latency-bound", o.latency_bound, "latency bound in ms (given-l)");
    explore_cmd->add_option("--k", o.k, "largest region count for prk");
    explore_cmd->add_option("--batch", o.batch, "single batch size to consider");
    explore_cmd->add_option("--top", o.top, "ranked plans to print");
    explore_cmd->add_option("--pareto", o.pareto, "write the Pareto front as CSV");

    auto* simulate_cmd = app.add_subcommand("simulate", "discrete-event simulation of a plan");
    add_inputs(simulate_cmd);
    add_plan(simulate_cmd);
    simulate_cmd->add_option("--horizon", o.horizon, "frames to simulate");
    simulate_cmd->add_option("--out-csv", o.out_csv, "write the timeline as CSV");
    simulate_cmd->add_option("--out-svg", o.out_svg, "write the timeline as an SVG Gantt chart");
    simulate_cmd->add_flag("--asic-pipelined", o.asic_pipelined, "overlap frames in ASIC-style plans");
    simulate_cmd->add_flag("--contention", o.contention, "share memory bandwidth between concurrent runs");

    auto* report_cmd = app.add_subcommand("report", "case-study result tables from the shipped data");
    report_cmd->add_option("--data", o.data_dir, "data directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (estimate_cmd->parsed()) return cmd_estimate(o, out, err);
        if (explore_cmd->parsed()) return cmd_explore(o, out, err);
        if (simulate_cmd->parsed()) return cmd_simulate(o, out, err);
        out << case_study_report(o.data_dir);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const FeasibilityError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const CapacityError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const PlanError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace prfront::cli
