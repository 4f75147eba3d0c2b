#include "prfront/charlib.hpp"
#include "prfront/error.hpp"
#include "prfront/model.hpp"

#include "random_instances.hpp"

#include <doctest.h>

#include <map>
#include <string>

using namespace prfront;

namespace {

const std::string kData = PRFRONT_TEST_DATA_DIR;

struct Study {
    Application app;
    ModuleLibrary library;
    Platform platform;

    VariantAssignment uniform(const std::string& id) const {
        std::map<std::string, std::string> choice;
        for (const auto& t : app.tasks) choice[t.name] = id;
        return make_assignment(app, library, choice);
    }
};

Study study(const std::string& app, const std::vector<std::string>& libs, const std::string& platform = "ultra96") {
    Study s;
    s.app = parse_application(read_file(kData + "/" + app + ".app"));
    for (const auto& l : libs) s.library.merge(parse_library(read_file(kData + "/" + l + ".lib")));
    s.platform = parse_platform(read_file(kData + "/" + platform + ".platform"));
    return s;
}

ModuleVariant variant(const std::string& task, Rational latency, Rational throughput, Rational bandwidth = 0) {
    ModuleVariant v;
    v.task_name = task;
    v.variant_id = "v";
    v.resources = {Rational(1000), Rational(10), Rational(10)};
    v.latency_ms = latency;
    v.throughput_fps = throughput;
    v.bandwidth_mbps = bandwidth;
    return v;
}

}  // namespace

TEST_CASE("pr time scales with region size") {
    const Platform pcap = parse_platform(read_file(kData + "/ultra96_pcap.platform"));
    CHECK(pr_time_ms(Rational(1), pcap) == Rational(5500, 453));
    CHECK(to_fixed(pr_time_ms(Rational(1, 2), pcap), 2) == "6.07");
    CHECK(pr_time_ms(Rational(1, 1000000), pcap) < Rational(1, 10000));
    CHECK_THROWS_AS(pr_time_ms(Rational(0), pcap), DomainError);
    CHECK_THROWS_AS(pr_time_ms(Rational(3, 2), pcap), DomainError);
}

TEST_CASE("asic latency and throughput") {
    const Study depth = study("depth", {"depth_asic"});
    CHECK(asic_latency(depth.uniform("a1"), depth.platform) == Rational(567, 10));

    const Study act = study("activity", {"activity_asic"});
    CHECK(asic_throughput(act.uniform("a1"), act.platform) == 16);
    CHECK(asic_latency(act.uniform("a1"), act.platform) == Rational(161825, 1626));
    CHECK(to_fixed(asic_latency(act.uniform("a1"), act.platform), 1) == "99.5");

    VariantAssignment one{{variant("x", Rational(7, 3), Rational(50))}};
    CHECK(asic_latency(one, act.platform) == Rational(7, 3));

    VariantAssignment same{{variant("a", 1, 40), variant("b", 1, 40)}};
    CHECK(asic_throughput(same, act.platform) == 40);

    VariantAssignment throttled{{variant("a", 1, 40), variant("b", 1, 100, act.platform.mem_bandwidth_mbps * 4)}};
    CHECK(asic_throughput(throttled, act.platform) == 25);
}

TEST_CASE("asic plan over budget names the resource") {
    const Study act = study("activity", {"pr_variants"});
    ExecutionPlan plan{Strategy::Asic, act.uniform("p1"), 1, 1, std::nullopt};
    try {
        estimate(plan, act.app, act.platform);
        FAIL("expected infeasibility");
    } catch (const FeasibilityError& e) {
        CHECK(e.resource() == "lut");
    }
}

TEST_CASE("single-region bounds") {
    const Study act = study("activity", {"pr_variants"});
    CHECK(pr1_latency_bound(act.app, act.platform, act.library) == Rational(4028, 100));
    CHECK(pr1_throughput_bound(act.app, act.platform, act.library) == Rational(487200, 19657));

    Platform free_pr = act.platform;
    free_pr.bitstream_bytes_full = 0;
    CHECK(pr1_latency(act.uniform("p1"), free_pr) == pr1_latency_bound(act.app, act.platform, act.library));
    CHECK(pr1_latency(act.uniform("p1"), act.platform) > pr1_latency_bound(act.app, act.platform, act.library));

    Study lone = act;
    lone.app.tasks.resize(1);
    CHECK(pr1_latency_bound(lone.app, lone.platform, lone.library) == Rational(43, 5));
    CHECK(pr1_throughput_bound(lone.app, lone.platform, lone.library) == 116);

    Study missing = act;
    missing.app.tasks.push_back({"sift", 10});
    CHECK_THROWS(pr1_latency_bound(missing.app, missing.platform, missing.library));
}

TEST_CASE("single-region latency") {
    const Study depth = study("depth", {"pr_variants"});
    CHECK(pr1_latency(depth.uniform("p1"), depth.platform) == Rational(544, 10));
    CHECK(pr1_latency(depth.uniform("p2"), depth.platform, Rational(1, 2)) == Rational(553, 10));
    const Study facial = study("facial", {"pr_variants"});
    CHECK(pr1_latency(facial.uniform("p1"), facial.platform) == Rational(9188, 100));
}

TEST_CASE("batched throughput") {
    const Study act = study("activity", {"pr_variants"});
    const auto a = act.uniform("p1");
    CHECK(pr1_throughput(act.app, a, act.platform, 64) == Rational(9744000, 398621));
    CHECK(pr1_throughput(act.app, a, act.platform, 1) == Rational(2436000, 185981));
    const Rational bound = pr1_throughput_bound(act.app, act.platform, act.library);
    Rational previous;
    for (int b = 1; b <= 2048; b *= 2) {
        const Rational t = pr1_throughput(act.app, a, act.platform, b);
        CHECK(t >= previous);
        CHECK(t < bound);
        previous = t;
    }
    CHECK(bound - previous < Rational(1, 10));
}

TEST_CASE("batched throughput respects buffer capacity") {
    Study act = study("activity", {"pr_variants"});
    act.platform.buffer_capacity_bytes = 1000000;
    try {
        pr1_throughput(act.app, act.uniform("p1"), act.platform, 64);
        FAIL("expected capacity error");
    } catch (const CapacityError& e) {
        CHECK(e.required() == 50331648ULL);
        CHECK(e.available() == 1000000ULL);
    }
}

TEST_CASE("interleaved latency includes one initial load") {
    const Study depth = study("depth", {"pr_variants"});
    CHECK(pr2_latency(depth.uniform("p2"), depth.platform) == Rational(433, 10));
    const Study act = study("activity", {"pr_variants"});
    CHECK(pr2_latency(act.uniform("p2"), act.platform) == Rational(924, 10));
    CHECK(pr2_throughput(act.uniform("p2"), act.platform) == Rational(625, 54));

    Platform free_pr = act.platform;
    free_pr.bitstream_bytes_full = 0;
    CHECK(pr2_latency(act.uniform("p2"), free_pr) == Rational(8127, 100));
}

TEST_CASE("k regions scale the single-region rate") {
    const Study act = study("activity", {"pr_variants"});
    const auto a = act.uniform("p2");
    CHECK(prk_throughput(act.app, a, act.platform, 2, 64) == Rational(1600000, 65241));
    CHECK(prk_throughput(act.app, a, act.platform, 2, 8) ==
          2 * pr1_throughput(act.app, a, act.platform, 8, Rational(1, 2)));
    CHECK(prk_throughput(act.app, a, act.platform, 1, 8, Rational(1, 2)) ==
          pr1_throughput(act.app, a, act.platform, 8, Rational(1, 2)));
}

TEST_CASE("bandwidth throttling") {
    Platform p;
    p.mem_bandwidth_mbps = 100;
    CHECK(effective_throughput(variant("a", 1, 116, Rational(912, 10)), p) == 116);
    CHECK(effective_throughput(variant("a", 1, 116, 100), p) == 116);
    CHECK(effective_throughput(variant("a", 1, 116, 200), p) == 58);

    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        const auto in = testing::random_sim_instance(rng);
        for (const auto& v : in.library.variants()) {
            const Rational t = effective_throughput(v, in.platform);
            CHECK(t <= v.throughput_fps);
            CHECK((t == v.throughput_fps) == (v.bandwidth_mbps <= in.platform.mem_bandwidth_mbps));
        }
    }
}

TEST_CASE("buffer requirement") {
    const Study act = study("activity", {"pr_variants"});
    CHECK(buffer_requirement(act.app, act.uniform("p1"), 64) == 50331648ULL);
    CHECK(buffer_requirement(act.app, act.uniform("p1"), 128) == 2 * 50331648ULL);
    Application tiny{"tiny", {{"a", 1024}}};
    VariantAssignment one{{variant("a", 1, 1)}};
    CHECK(buffer_requirement(tiny, one, 1) == 1024ULL);
}

TEST_CASE("performance density") {
    const Study act = study("activity", {"activity_asic", "pr_variants"});
    const auto asic = estimate({Strategy::Asic, act.uniform("a1"), 1, 1, std::nullopt}, act.app, act.platform);
    CHECK(asic.bottleneck == Resource::Bram36);
    CHECK(asic.throughput_density == Rational(16) / Rational(413, 2));
    CHECK(to_fixed(asic.throughput_density, 3) == "0.077");
    CHECK(to_fixed(asic.latency_density, 3) == "0.049");

    const auto p1 = estimate({Strategy::Pr1, act.uniform("p1"), 64, 1, std::nullopt}, act.app, act.platform);
    CHECK(p1.bottleneck_used == 198);
    CHECK(to_fixed(p1.throughput_density, 2) == "0.12");
    CHECK(p1.buffer_bytes == 50331648ULL);
    CHECK(p1.bandwidth_peak_mbps == Rational(912, 10));
    CHECK(to_fixed(asic.bandwidth_peak_mbps, 1) == "69.6");

    const Density unit = performance_density(Rational(30), {Rational(0), Rational(1), Rational(0)}, act.platform);
    CHECK(unit.value == 30);
    CHECK_THROWS_AS(performance_density(Rational(30), {}, act.platform), DomainError);
}

TEST_CASE("plan structure checks") {
    const Study act = study("activity", {"pr_variants"});
    const auto a = act.uniform("p2");
    CHECK_THROWS_AS(check_plan({Strategy::Asic, a, 4, 1, std::nullopt}), PlanError);
    CHECK_THROWS_AS(check_plan({Strategy::Pr2, a, 2, 1, std::nullopt}), PlanError);
    CHECK_THROWS_AS(check_plan({Strategy::Prk, a, 1, 1, std::nullopt}), PlanError);
    CHECK_THROWS_AS(check_plan({Strategy::Pr1, a, 0, 1, std::nullopt}), DomainError);
    CHECK_THROWS_AS(check_plan({Strategy::Pr2, a, 1, 1, Rational(3, 4)}), PlanError);
    CHECK_THROWS_AS(check_plan({Strategy::Prk, a, 1, 3, Rational(1, 2)}), PlanError);
    CHECK_NOTHROW(check_plan({Strategy::Prk, a, 8, 3, std::nullopt}));
    CHECK(describe({Strategy::Pr1, act.uniform("p1"), 64, 1, std::nullopt}) == "pr1 f=1 B=64 [hog:p1 cnn:p1 lstm:p1]");
    CHECK(footprint({Strategy::Pr2, a, 1, 1, std::nullopt}, act.platform).bram36 == 216);
    CHECK_THROWS_AS(make_assignment(act.app, act.library, {{"hog", "p1"}}), PlanError);
    CHECK_THROWS_AS(make_assignment(act.app, act.library, {{"hog", "p9"}, {"cnn", "p1"}, {"lstm", "p1"}}), PlanError);
}

TEST_CASE("slack reconstruction with latency inversely proportional to area") {
    Application app{"slack", {{"A", 64}, {"B", 64}}};
    Platform platform;
    platform.budget = {Rational(1000), Rational(100), Rational(100)};
    platform.pr_bandwidth_mbps = 1;
    platform.mem_bandwidth_mbps = 1;
    ModuleLibrary lib;
    for (const char* task : {"A", "B"}) {
        for (const auto& [id, area] : {std::pair{"half", Rational(1, 2)}, std::pair{"full", Rational(1)}}) {
            ModuleVariant v = variant(task, Rational(20) / area, area / 20 * 1000);
            v.variant_id = id;
            v.resources = area * platform.budget;
            lib.add(v);
        }
    }
    const auto half = make_assignment(app, lib, {{"A", "half"}, {"B", "half"}});
    const auto full = make_assignment(app, lib, {{"A", "full"}, {"B", "full"}});
    CHECK(asic_latency(half, platform) == 80);
    CHECK(pr1_latency(full, platform) == 40);
    CHECK(pr1_latency(half, platform, Rational(1, 2)) == 80);
}

TEST_CASE("evaluation is deterministic") {
    const Study act = study("activity", {"pr_variants"});
    const ExecutionPlan plan{Strategy::Prk, act.uniform("p2"), 16, 2, std::nullopt};
    const auto a = estimate(plan, act.app, act.platform);
    const auto b = estimate(plan, act.app, act.platform);
    CHECK(a.throughput_fps == b.throughput_fps);
    CHECK(a.latency_ms == b.latency_ms);
    CHECK(to_exact(a.throughput_fps) == to_exact(b.throughput_fps));
}
