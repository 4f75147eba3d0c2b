#pragma once

// Discrete-event simulation of area-time schedules. The PR controller is a single
// FIFO server, so at most one region reconfigures at any instant.

#include "prfront/charlib.hpp"
#include "prfront/model.hpp"
#include "prfront/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prfront {

enum class EventKind { PrStart, PrEnd, RunStart, RunEnd };

std::string_view to_string(EventKind k);

struct Event {
    Rational time_ms;
    EventKind kind = EventKind::RunStart;
    int region_id = 0;
    std::string task_name;
    /// Frame index for runs; first frame of the residency for PR events.
    long run_index = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

struct SimOptions {
    /// ASIC modules overlap successive frames instead of holding one frame in flight.
    bool asic_pipelined = false;
    /// Concurrent runs share memory bandwidth: when their summed demand exceeds the
    /// platform's, every active run slows by BW_total / sum(BW_i).
    bool bandwidth_contention = false;
};

struct SimResult {
    Rational first_run_latency_ms;
    Rational steady_throughput_fps;
    std::uint64_t peak_buffer_bytes = 0;
    std::vector<Rational> busy_fraction;  // per region
    std::vector<Event> timeline;
    Rational makespan_ms;
    std::vector<long> completed_runs;     // per task
    std::vector<Rational> stagger_offsets_ms;  // per region (Prk)
    /// False when no stagger keeps the Prk regions' reconfigurations apart; the
    /// regions then queue on the PR port and fall short of the closed-form rate.
    bool stagger_contention_free = true;
    bool blocked = false;
    std::string blocked_reason;
};

/// Runs `horizon_runs` frames through the plan's schedule.
///
/// Two passes are made. A probe pass pushes a single frame through with each run
/// taking the variant's latency; it yields `first_run_latency_ms`. The horizon pass
/// issues runs at the variant's (bandwidth-throttled) throughput and yields the
/// steady-state throughput, buffer peak, busy fractions and the timeline.
///
/// Throws PlanError/FeasibilityError for an infeasible plan and SimulationError on
/// deadlock. A schedule stalled by buffer capacity returns with `blocked` set.
SimResult simulate(const ExecutionPlan& plan, const Application& app, const Platform& platform, long horizon_runs,
                   const SimOptions& options = {});

struct DeltaReport {
    Rational latency_abs_ms;
    Rational latency_rel;
    Rational throughput_abs_fps;
    Rational throughput_rel;
    bool latency_exceeds = false;
    bool throughput_exceeds = false;
};

/// Deltas are simulated minus estimated; relative deltas are |delta| / estimate.
DeltaReport compare(const SimResult& sim, const PerformanceEstimate& estimate, const Rational& tolerance = Rational(0));

/// Offsets, multiples of the region PR time, at which the k regions of a Prk plan
/// never wait on each other's reconfigurations in steady state. nullopt when none exist.
std::optional<std::vector<Rational>> contention_free_stagger(const ExecutionPlan& plan, const Platform& platform);

/// CSV with columns time_ms,kind,region,task,run; times rendered to 6 decimals.
std::string timeline_csv(const std::vector<Event>& timeline);

}  // namespace prfront
