#include "random_instances.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace prfront::testing {

namespace {

long uniform(std::mt19937_64& rng, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(rng);
}

Rational random_rational(std::mt19937_64& rng, long lo_num, long hi_num, long max_den) {
    return Rational(uniform(rng, lo_num, hi_num), uniform(rng, 1, max_den));
}

Platform base_platform(std::mt19937_64& rng) {
    Platform p;
    p.name = "synthetic";
    p.budget = {Rational(100000), Rational(400), Rational(400)};
    // PR time = bitstream / (bandwidth * 1000) ms
    p.bitstream_bytes_full = static_cast<std::uint64_t>(uniform(rng, 1, 40)) * 1000;
    p.pr_bandwidth_mbps = Rational(uniform(rng, 1, 7), uniform(rng, 1, 3));
    p.mem_bandwidth_mbps = Rational(uniform(rng, 50, 400));
    p.buffer_capacity_bytes = 1ULL << 40;
    return p;
}

}  // namespace

Instance random_sim_instance(std::mt19937_64& rng) {
    Instance in;
    in.platform = base_platform(rng);
    in.app.name = "rand";
    const long n = uniform(rng, 1, 3);
    for (long t = 0; t < n; ++t) {
        const std::string task = "t" + std::to_string(t);
        in.app.tasks.push_back({task, static_cast<std::uint64_t>(uniform(rng, 1, 64)) * 1024});
        const long variants = uniform(rng, 1, 3);
        for (long v = 0; v < variants; ++v) {
            ModuleVariant mv;
            mv.task_name = task;
            mv.variant_id = "v" + std::to_string(v);
            mv.resources = {Rational(uniform(rng, 100, 50000)), Rational(uniform(rng, 0, 400), 2),
                            Rational(uniform(rng, 0, 200))};
            mv.latency_ms = random_rational(rng, 1, 400, 7);
            mv.throughput_fps = random_rational(rng, 5, 3000, 3);
            mv.bandwidth_mbps = Rational(uniform(rng, 0, 600));  // above the platform supply at times
            mv.style = DesignStyle::Pr;
            in.library.add(mv);
        }
    }
    return in;
}

Instance random_explore_instance(std::mt19937_64& rng) {
    Instance in;
    in.platform = base_platform(rng);
    // even lut and dsp counts keep a half region integral
    in.platform.budget = {Rational(2 * uniform(rng, 10000, 45000)), Rational(uniform(rng, 100, 300)),
                          Rational(2 * uniform(rng, 50, 150))};
    if (uniform(rng, 0, 3) == 0) {
        in.platform.regions.push_back({Rational(1, 2), Rational(1, 2) * in.platform.budget});
    }
    in.platform.buffer_capacity_bytes = static_cast<std::uint64_t>(uniform(rng, 1, 64)) * 1024 * 1024;
    in.app.name = "rand";
    const long n = uniform(rng, 1, 3);
    for (long t = 0; t < n; ++t) {
        const std::string task = "t" + std::to_string(t);
        in.app.tasks.push_back({task, static_cast<std::uint64_t>(uniform(rng, 1, 512)) * 1024});
        const long variants = uniform(rng, 1, 3);
        for (long v = 0; v < variants; ++v) {
            ModuleVariant mv;
            mv.task_name = task;
            mv.variant_id = "v" + std::to_string(v);
            mv.resources = {Rational(uniform(rng, 1000, 60000)), Rational(uniform(rng, 0, 300), 2),
                            Rational(uniform(rng, 0, 150))};
            // coarse grids make ties between plans common
            mv.latency_ms = Rational(uniform(rng, 1, 12) * 5);
            mv.throughput_fps = Rational(uniform(rng, 1, 8) * 10);
            mv.bandwidth_mbps = Rational(uniform(rng, 0, 4) * 50);
            mv.style = static_cast<DesignStyle>(uniform(rng, 0, 2));
            in.library.add(mv);
        }
    }
    return in;
}

Problem random_problem(std::mt19937_64& rng) {
    Problem p;
    p.kind = static_cast<ProblemKind>(uniform(rng, 0, 2));
    if (p.kind == ProblemKind::GivenLMinA) p.latency_bound_ms = Rational(uniform(rng, 20, 200));
    p.k_max = static_cast<int>(uniform(rng, 2, 3));
    p.batch_candidates.clear();
    for (int b : {1, 2, 4, 8, 16}) {
        if (b == 1 || uniform(rng, 0, 1) == 1) p.batch_candidates.push_back(b);
    }
    return p;
}

VariantAssignment random_assignment(const Instance& in, std::mt19937_64& rng) {
    VariantAssignment a;
    for (const auto& task : in.app.tasks) {
        const auto options = in.library.for_task(task.name);
        a.variants.push_back(*options[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(options.size()) - 1))]);
    }
    return a;
}

std::vector<std::pair<Rational, Rational>> pr_intervals(const std::vector<Event>& timeline) {
    std::map<int, Rational> open;
    std::vector<std::pair<Rational, Rational>> out;
    for (const auto& e : timeline) {
        if (e.kind == EventKind::PrStart) open[e.region_id] = e.time_ms;
        if (e.kind == EventKind::PrEnd) out.emplace_back(open.at(e.region_id), e.time_ms);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int overlapping_pr_intervals(const std::vector<Event>& timeline) {
    const auto intervals = pr_intervals(timeline);
    int overlaps = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        for (std::size_t j = i + 1; j < intervals.size() && intervals[j].first < intervals[i].second; ++j) {
            ++overlaps;
        }
    }
    return overlaps;
}

}  // namespace prfront::testing
