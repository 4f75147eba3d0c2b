#include "prfront/charlib.hpp"
#include "prfront/error.hpp"
#include "prfront/model.hpp"

#include "random_instances.hpp"

#include <doctest.h>

#include <string>

using namespace prfront;

namespace {

const std::string kData = PRFRONT_TEST_DATA_DIR;

std::string data(const std::string& name) { return read_file(kData + "/" + name); }

const char* kHog = R"(
# hog, single-region variant
[variant]
task = hog
variant = p1
lut = 55635
bram36 = 109
dsp = 114
throughput_fps = 116
latency_ms = 8.6
bandwidth_mbps = 91.2
)";

const char* kPlatform = R"(
[platform]
budget_lut = 70560
budget_bram36 = 206.5
budget_dsp = 360
pr_bandwidth_mbps = 453
bitstream_bytes_full = 5500000
mem_bandwidth_mbps = 4264
buffer_capacity_bytes = 2147483648
)";

}  // namespace

TEST_CASE("variant record parses field for field") {
    const ModuleLibrary lib = parse_library(kHog);
    REQUIRE(lib.size() == 1);
    const ModuleVariant& v = lib.variants().front();
    CHECK(v.task_name == "hog");
    CHECK(v.variant_id == "p1");
    CHECK(v.resources == ResourceVector{Rational(55635), Rational(109), Rational(114)});
    CHECK(v.throughput_fps == 116);
    CHECK(v.latency_ms == Rational(43, 5));
    CHECK(v.bandwidth_mbps == Rational(456, 5));
    CHECK(v.style == DesignStyle::Any);
    CHECK(lib.find("hog", "p1") == &v);
    CHECK(lib.find("hog", "p2") == nullptr);
}

TEST_CASE("empty library text") {
    CHECK(parse_library("").empty());
    CHECK(parse_library("# only a comment\n\n").empty());
}

TEST_CASE("duplicate variant is rejected") {
    const std::string twice = std::string(kHog) + kHog;
    CHECK_THROWS_AS(parse_library(twice), DuplicateError);
    ModuleLibrary lib = parse_library(kHog);
    CHECK_THROWS_AS(lib.merge(parse_library(kHog)), DuplicateError);
}

TEST_CASE("malformed records report the line") {
    SUBCASE("unknown key") {
        try {
            parse_library("[variant]\ntask = a\nvariant = b\nspeed = 3\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("missing field is named") {
        try {
            parse_library("[variant]\ntask = a\nvariant = b\nbram36 = 1\ndsp = 0\nlatency_ms = 2\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("lut") != std::string::npos);
        }
    }
    SUBCASE("bad number") {
        CHECK_THROWS_AS(parse_library("[variant]\ntask = a\nvariant = b\nlut = ten\n"), ParseError);
    }
    SUBCASE("fractional lut") {
        CHECK_THROWS_AS(parse_library("[variant]\ntask=a\nvariant=b\nlut=1.5\nbram36=0\ndsp=0\nlatency_ms=1\n"), ParseError);
    }
    SUBCASE("line outside a record") {
        CHECK_THROWS_AS(parse_library("lut = 3\n"), ParseError);
    }
    SUBCASE("foreign record kind") {
        CHECK_THROWS_AS(parse_library("[task]\nname = a\ninput_bytes = 3\n"), ParseError);
    }
}

TEST_CASE("nonpositive rates are domain errors") {
    CHECK_THROWS_AS(parse_library("[variant]\ntask=a\nvariant=b\nlut=1\nbram36=0\ndsp=0\nlatency_ms=0\n"), DomainError);
    CHECK_THROWS_AS(parse_library("[variant]\ntask=a\nvariant=b\nlut=1\nbram36=0\ndsp=0\nthroughput_fps=-2\n"),
                    DomainError);
}

TEST_CASE("a single rate implies the other") {
    const auto lib = parse_library("[variant]\ntask=a\nvariant=b\nlut=1\nbram36=0\ndsp=0\nthroughput_fps=16\n");
    CHECK(lib.variants().front().latency_ms == Rational(125, 2));
}

TEST_CASE("platform parses exactly") {
    const Platform p = parse_platform(kPlatform);
    CHECK(p.budget.bram36 == Rational(413, 2));
    CHECK(p.pr_bandwidth_mbps == 453);
    CHECK(to_fixed(pr_time_ms(Rational(1), p), 1) == "12.1");
    CHECK(p.region_resources(Rational(1, 2)) == ResourceVector{Rational(35280), Rational(413, 4), Rational(180)});
}

TEST_CASE("platform missing a field names it") {
    std::string text = kPlatform;
    text.erase(text.find("mem_bandwidth_mbps"), std::string("mem_bandwidth_mbps = 4264\n").size());
    try {
        parse_platform(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("mem_bandwidth_mbps") != std::string::npos);
    }
}

TEST_CASE("declared region shapes override the fractional budget") {
    const Platform p = parse_platform(data("ultra96.platform"));
    CHECK(p.region_resources(Rational(1)) == ResourceVector{Rational(61920), Rational(198), Rational(288)});
    CHECK(p.region_resources(Rational(1, 2)) == ResourceVector{Rational(28800), Rational(108), Rational(144)});
    CHECK(p.region_resources(Rational(1, 4)).lut == Rational(17640));
    CHECK(pr_time_ms(Rational(1), p) == 12);
}

TEST_CASE("application keeps task order") {
    const Application app = parse_application(data("activity.app"));
    CHECK(app.name == "activity");
    REQUIRE(app.size() == 3);
    CHECK(app.tasks[0].name == "hog");
    CHECK(app.tasks[2].name == "lstm");
    CHECK(app.tasks[1].input_bytes == 262144);
    CHECK_THROWS_AS(parse_application("[task]\nname = a\ninput_bytes = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_application("[application]\nname = x\n[task]\nname = a\ninput_bytes = 1\n[task]\nname = a\n"
                                      "input_bytes = 2\n"),
                    ParseError);
}

TEST_CASE("serialize round-trips shipped and random data") {
    for (const char* name : {"pr_variants.lib", "activity_asic.lib", "depth_asic.lib"}) {
        const ModuleLibrary lib = parse_library(data(name));
        CHECK(parse_library(serialize(lib)) == lib);
    }
    for (const char* name : {"ultra96.platform", "ultra96_pcap.platform"}) {
        const Platform p = parse_platform(data(name));
        CHECK(parse_platform(serialize(p)) == p);
    }
    const Application app = parse_application(data("depth.app"));
    CHECK(parse_application(serialize(app)) == app);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto in = testing::random_explore_instance(rng);
        CHECK(parse_library(serialize(in.library)) == in.library);
        CHECK(parse_platform(serialize(in.platform)) == in.platform);
        CHECK(parse_application(serialize(in.app)) == in.app);
    }
}

TEST_CASE("validation of shipped data") {
    const Application app = parse_application(data("activity.app"));
    const Platform platform = parse_platform(data("ultra96.platform"));
    const ModuleLibrary lib = parse_library(data("pr_variants.lib"));
    const ValidationReport report = validate(lib, app, platform);
    CHECK_FALSE(report.has_fatal());
}

TEST_CASE("validation findings") {
    const Application app = parse_application(data("activity.app"));
    Platform platform = parse_platform(data("ultra96.platform"));

    SUBCASE("uncovered task") {
        ModuleLibrary lib;
        for (const auto& v : parse_library(data("pr_variants.lib")).variants()) {
            if (v.task_name != "cnn") lib.add(v);
        }
        const auto report = validate(lib, app, platform);
        CHECK(report.has_fatal());
        REQUIRE(report.with_code("task-uncovered").size() == 1);
        CHECK(report.with_code("task-uncovered").front().message.find("cnn") != std::string::npos);
    }
    SUBCASE("non-fitting variant") {
        ModuleLibrary lib = parse_library(data("activity_asic.lib"));
        ModuleVariant big = lib.variants().front();
        big.variant_id = "huge";
        big.resources.lut = platform.budget.lut + 1;
        lib.add(big);
        const auto report = validate(lib, app, platform);
        CHECK_FALSE(report.has_fatal());
        CHECK(report.with_code("non-fitting").size() == 1);
    }
    SUBCASE("budget below every variant") {
        platform.budget.bram36 = 10;
        const auto report = validate(parse_library(data("activity_asic.lib")), app, platform);
        CHECK(report.has_fatal());
        CHECK(report.with_code("task-unfit").size() >= 1);
    }
    SUBCASE("dominated and throttled variants") {
        ModuleLibrary lib = parse_library(data("activity_asic.lib"));
        ModuleVariant worse = lib.variants().front();
        worse.variant_id = "slow";
        worse.throughput_fps /= 2;
        worse.latency_ms *= 2;
        worse.bandwidth_mbps = platform.mem_bandwidth_mbps * 2;
        lib.add(worse);
        const auto report = validate(lib, app, platform);
        CHECK(report.with_code("dominated").size() == 1);
        CHECK(report.with_code("bandwidth-throttled").size() == 1);
        CHECK(report.with_code("bandwidth-throttled").front().severity == Severity::Info);
    }
    SUBCASE("empty application") {
        const auto report = validate(parse_library(data("pr_variants.lib")), Application{"none", {}}, platform);
        CHECK(report.with_code("empty-application").size() == 1);
    }
}

TEST_CASE("dominance") {
    ModuleVariant a;
    a.resources = {Rational(10), Rational(1), Rational(1)};
    a.latency_ms = 5;
    a.throughput_fps = 200;
    ModuleVariant b = a;
    CHECK_FALSE(dominates(a, b));
    b.resources.lut = 11;
    CHECK(dominates(a, b));
    CHECK_FALSE(dominates(b, a));
    b.latency_ms = 4;
    CHECK_FALSE(dominates(a, b));
}
