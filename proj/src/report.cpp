#include "prfront/report.hpp"

#include "prfront/error.hpp"
#include "prfront/explore.hpp"
#include "prfront/model.hpp"

#include <fmt/format.h>

#include <map>
#include <optional>

#ifndef PRFRONT_DATA_DIR
#define PRFRONT_DATA_DIR "data"
#endif

namespace prfront {

std::string default_data_dir() { return PRFRONT_DATA_DIR; }

namespace {

struct Inputs {
    Application app;
    ModuleLibrary library;
    Platform platform;
};

struct DesignPoint {
    std::string label;
    Strategy strategy;
    std::string variant_id;
    std::optional<Rational> fraction;
};

std::map<std::string, std::string> uniform_choice(const Application& app, const std::string& id) {
    std::map<std::string, std::string> choice;
    for (const auto& t : app.tasks) choice[t.name] = id;
    return choice;
}

Problem problem_of(ProblemKind kind) {
    Problem p;
    p.kind = kind;
    return p;
}

std::string fmt3(const Rational& r) { return to_fixed(r, 3); }

void design_table(std::string& out, const Inputs& in, const std::vector<DesignPoint>& points) {
    out += fmt::format("{:<6} {:<42} {:>11} {:>14} {:>10} {:>9} {:>10} {:>10}\n", "design", "plan", "latency_ms",
                       "throughput_fps", "bottleneck", "used", "fps/unit", "1/s/unit");
    for (const auto& p : points) {
        std::string plan_text = "-";
        try {
            ExecutionPlan plan;
            plan.strategy = p.strategy;
            plan.region_fraction = p.fraction;
            plan.assignment = make_assignment(in.app, in.library, uniform_choice(in.app, p.variant_id));
            plan_text = describe(plan);
            const PerformanceEstimate e = estimate(plan, in.app, in.platform);
            out += fmt::format("{:<6} {:<42} {:>11} {:>14} {:>10} {:>9} {:>10} {:>10}\n", p.label, plan_text,
                               fmt3(e.latency_ms), fmt3(e.throughput_fps), to_string(e.bottleneck),
                               to_fixed(e.bottleneck_used, 1), fmt3(e.throughput_density), fmt3(e.latency_density));
        } catch (const Error& err) {
            out += fmt::format("{:<6} {:<42} infeasible: {}\n", p.label, plan_text, err.what());
        }
    }
}

void winners(std::string& out, const Inputs& in, const Problem& problem) {
    std::string title(to_string(problem.kind));
    if (problem.latency_bound_ms) title += " (bound " + fmt3(*problem.latency_bound_ms) + " ms)";
    const ExplorationResult r = solve(problem, in.app, in.library, in.platform);
    if (!r.feasible()) {
        out += fmt::format("explore {}: infeasible\n", title);
    } else {
        const auto& best = r.best();
        out += fmt::format("explore {}: {} latency {} ms, throughput {} fps, {} {}\n", title, describe(best.plan),
                           fmt3(best.estimate.latency_ms), fmt3(best.estimate.throughput_fps),
                           to_fixed(best.estimate.bottleneck_used, 1), to_string(best.estimate.bottleneck));
    }
    for (const auto& [strategy, reason] : r.infeasible) {
        out += fmt::format("  {} infeasible: {}\n", to_string(strategy), reason);
    }
}

Inputs load(const std::string& dir, const std::string& app, const std::vector<std::string>& libs,
            const std::string& platform) {
    Inputs in;
    in.app = parse_application(read_file(dir + "/" + app));
    for (const auto& lib : libs) in.library.merge(parse_library(read_file(dir + "/" + lib)));
    in.platform = parse_platform(read_file(dir + "/" + platform));
    return in;
}

}  // namespace

std::string case_study_report(const std::string& data_dir) {
    const std::vector<DesignPoint> points{
        {"ASIC", Strategy::Asic, "a1", std::nullopt},
        {"P1", Strategy::Pr1, "p1", std::nullopt},
        {"P1,s", Strategy::Pr1, "p2", Rational(1, 2)},
        {"P2", Strategy::Pr2, "p2", std::nullopt},
    };
    std::string out;

    const Platform pcap = parse_platform(read_file(data_dir + "/ultra96_pcap.platform"));
    out += "PR time\n";
    out += fmt::format("  {}: full region {} ms, half region {} ms\n", pcap.name, fmt3(pr_time_ms(Rational(1), pcap)),
                       fmt3(pr_time_ms(Rational(1, 2), pcap)));

    {
        const Inputs in = load(data_dir, "activity.app", {"activity_asic.lib", "pr_variants.lib"}, "ultra96.platform");
        out += fmt::format("\nactivity on {}\n", in.platform.name);
        design_table(out, in, points);

        out += fmt::format("\n{:>3} {:>14} {:>8} {:>10}\n", "B", "throughput_fps", "gain_%", "buffer_MB");
        const VariantAssignment p1 = make_assignment(in.app, in.library, uniform_choice(in.app, "p1"));
        std::optional<Rational> previous;
        for (int b : {1, 2, 4, 8, 16, 32, 64}) {
            const Rational t = pr1_throughput(in.app, p1, in.platform, b);
            const std::string gain = previous ? to_fixed((t / *previous - 1) * 100, 2) : std::string("-");
            const Rational mb = Rational(static_cast<long long>(buffer_requirement(in.app, p1, b)), 1000000);
            out += fmt::format("{:>3} {:>14} {:>8} {:>10}\n", b, fmt3(t), gain, to_fixed(mb, 1));
            previous = t;
        }
        out += "\n";
        winners(out, in, problem_of(ProblemKind::MaxTGivenA));
        winners(out, in, problem_of(ProblemKind::MinLGivenA));
    }
    {
        const Inputs in = load(data_dir, "depth.app", {"depth_asic.lib", "pr_variants.lib"}, "ultra96.platform");
        out += fmt::format("\ndepth on {}\n", in.platform.name);
        design_table(out, in, points);
        out += "\n";
        winners(out, in, problem_of(ProblemKind::MinLGivenA));
        Problem bounded = problem_of(ProblemKind::GivenLMinA);
        bounded.latency_bound_ms = Rational(60);
        winners(out, in, bounded);
    }
    {
        const Inputs in = load(data_dir, "facial.app", {"pr_variants.lib"}, "ultra96.platform");
        out += fmt::format("\nfacial on {}\n", in.platform.name);
        design_table(out, in, points);
        out += "\n";
        winners(out, in, problem_of(ProblemKind::MinLGivenA));
    }
    return out;
}

}  // namespace prfront
