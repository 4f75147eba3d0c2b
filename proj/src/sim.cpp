#include "prfront/sim.hpp"

#include "prfront/error.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>

namespace prfront {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::PrStart: return "PrStart";
        case EventKind::PrEnd: return "PrEnd";
        case EventKind::RunStart: return "RunStart";
        case EventKind::RunEnd: return "RunEnd";
    }
    return "?";
}

namespace {

// Tie order at equal times: PrEnd < RunEnd < PrStart < RunStart.
int tie_rank(EventKind k) {
    switch (k) {
        case EventKind::PrEnd: return 0;
        case EventKind::RunEnd: return 1;
        case EventKind::PrStart: return 2;
        case EventKind::RunStart: return 3;
    }
    return 4;
}

struct Action {
    bool load = false;
    int task = 0;
    long frame = 0;  // first frame of the residency for loads
};

struct Batch {
    int region = 0;
    long first = 0;
    long last = 0;  // inclusive
};

struct Schedule {
    std::vector<std::vector<Action>> scripts;  // per region
    std::vector<int> preloaded;                // per region, -1 if none
    std::vector<Batch> batches;                // batched strategies only
};

struct PassConfig {
    std::vector<Rational> duration_ms;  // per task, at full rate
    std::vector<Rational> bandwidth;    // per task
    Rational bandwidth_total;
    bool contention = false;
    Rational pr_ms;
    bool lockstep = false;      // release at max(end, start + pr_ms)
    bool one_in_flight = false; // frame f enters task 0 only once frame f-1 left the chain
    std::vector<Rational> offsets_ms;
};

struct PassResult {
    std::vector<Event> timeline;
    std::vector<std::vector<std::optional<Rational>>> released;  // [task][frame]
    std::vector<Rational> busy_ms;
    Rational makespan;
    std::uint64_t peak_buffer = 0;
    bool blocked = false;
    std::string blocked_reason;
};

Schedule build_schedule(Strategy strategy, int regions, int tasks, long horizon, int batch) {
    Schedule s;
    s.scripts.resize(static_cast<std::size_t>(regions));
    s.preloaded.assign(static_cast<std::size_t>(regions), -1);
    switch (strategy) {
        case Strategy::Asic:
            for (int i = 0; i < tasks; ++i) {
                s.preloaded[static_cast<std::size_t>(i)] = i;
                for (long f = 0; f < horizon; ++f) s.scripts[static_cast<std::size_t>(i)].push_back({false, i, f});
            }
            break;
        case Strategy::Pr1:
        case Strategy::Prk: {
            long b = 0;
            for (long first = 0; first < horizon; first += batch, ++b) {
                const long last = std::min(horizon, first + batch) - 1;
                const int region = static_cast<int>(b % regions);
                auto& script = s.scripts[static_cast<std::size_t>(region)];
                for (int i = 0; i < tasks; ++i) {
                    script.push_back({true, i, first});
                    for (long f = first; f <= last; ++f) script.push_back({false, i, f});
                }
                s.batches.push_back({region, first, last});
            }
            break;
        }
        case Strategy::Pr2: {
            long pair = 0;
            for (long f = 0; f < horizon; ++f) {
                for (int i = 0; i < tasks; ++i, ++pair) {
                    auto& script = s.scripts[static_cast<std::size_t>(pair % 2)];
                    script.push_back({true, i, f});
                    script.push_back({false, i, f});
                }
            }
            break;
        }
    }
    return s;
}

Rational mod_positive(const Rational& x, const Rational& m) {
    Rational q = x / m;
    BigInt fl = boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q);
    if (Rational(fl) > q) fl -= 1;
    Rational r = x - Rational(fl) * m;
    if (r < 0) r += m;
    return r;
}

struct Stagger {
    std::vector<Rational> offsets;
    bool contention_free = true;
};

/// Smallest multiples of the PR time, region by region, such that the periodic PR
/// intervals of all regions never overlap. Falls back to back-to-back starts when
/// no such multiple exists.
Stagger stagger_offsets(int regions, const std::vector<Rational>& duration, const Rational& pr_ms, int batch) {
    Stagger out;
    out.offsets.resize(static_cast<std::size_t>(regions));
    auto& offsets = out.offsets;
    if (regions <= 1 || pr_ms == 0 || duration.empty()) return out;

    const Rational b(batch);
    std::vector<Rational> starts;
    Rational t;
    for (const auto& d : duration) {
        starts.push_back(t);
        t += pr_ms + b * d;
    }
    const Rational period = t;
    const std::size_t n = duration.size();

    auto overlaps = [&](const Rational& x, const Rational& y) {
        return mod_positive(y - x, period) < pr_ms || mod_positive(x - y, period) < pr_ms;
    };

    std::vector<Rational> placed;  // absolute PR starts of already-placed regions
    for (const auto& s : starts) placed.push_back(s);

    const Rational steps = period / pr_ms;
    const BigInt max_steps = boost::multiprecision::numerator(steps) / boost::multiprecision::denominator(steps) + 1;
    for (int r = 1; r < regions; ++r) {
        std::optional<Rational> chosen;
        for (BigInt m = 0; m <= max_steps && !chosen; ++m) {
            const Rational offset = Rational(m) * pr_ms;
            bool clash = false;
            for (std::size_t j = 0; j < n && !clash; ++j) {
                for (const auto& other : placed) {
                    if (overlaps(offset + starts[j], other)) {
                        clash = true;
                        break;
                    }
                }
            }
            if (!clash) chosen = offset;
        }
        if (!chosen) out.contention_free = false;
        const Rational offset = chosen.value_or(Rational(r) * Rational(static_cast<long long>(n)) * pr_ms);
        offsets[static_cast<std::size_t>(r)] = offset;
        for (const auto& s : starts) placed.push_back(offset + s);
    }
    return out;
}

class Engine {
public:
    Engine(const Application& app, const Platform& platform, const Schedule& schedule, const PassConfig& config,
           long horizon)
        : app_(app), platform_(platform), schedule_(schedule), cfg_(config), horizon_(horizon) {
        const std::size_t regions = schedule.scripts.size();
        state_.resize(regions);
        for (std::size_t r = 0; r < regions; ++r) {
            state_[r].loaded = schedule.preloaded[r];
            if (r < cfg_.offsets_ms.size()) state_[r].ready_at = cfg_.offsets_ms[r];
        }
        out_.released.assign(app.size(), std::vector<std::optional<Rational>>(static_cast<std::size_t>(horizon)));
        out_.busy_ms.assign(regions, Rational(0));
    }

    PassResult run() {
        while (true) {
            start_ready_work();
            std::optional<Rational> next = next_event_time();
            if (!next) {
                finish_or_report_stall();
                break;
            }
            advance_to(*next);
            complete_due_work();
        }
        out_.makespan = now_;
        std::stable_sort(out_.timeline.begin(), out_.timeline.end(), [](const Event& a, const Event& b) {
            if (a.time_ms != b.time_ms) return a.time_ms < b.time_ms;
            if (tie_rank(a.kind) != tie_rank(b.kind)) return tie_rank(a.kind) < tie_rank(b.kind);
            return a.region_id < b.region_id;
        });
        return std::move(out_);
    }

private:
    enum class State { Idle, Queued, Reconfiguring, Running };

    struct RegionState {
        std::size_t next = 0;
        Rational ready_at;
        int loaded = -1;
        State state = State::Idle;
        Action current;
        Rational remaining;
        Rational run_start;
    };

    enum class Gate { Ready, Waiting, BufferFull };

    const std::vector<Action>& script(std::size_t r) const { return schedule_.scripts[r]; }

    void emit(EventKind kind, std::size_t region, int task, long run) {
        out_.timeline.push_back({now_, kind, static_cast<int>(region), app_.tasks[static_cast<std::size_t>(task)].name, run});
    }

    const std::optional<Rational>& released(int task, long frame) const {
        return out_.released[static_cast<std::size_t>(task)][static_cast<std::size_t>(frame)];
    }

    std::uint64_t bytes_needed(const Action& a) const {
        const std::size_t i = static_cast<std::size_t>(a.task);
        std::uint64_t need = 0;
        if (i == 0) need += app_.tasks[0].input_bytes;
        if (i + 1 < app_.size()) need += app_.tasks[i + 1].input_bytes;
        return need;
    }

    Gate run_gate(const RegionState& rs, const Action& a, std::optional<Rational>& wake) const {
        if (rs.loaded != a.task) return Gate::Waiting;
        auto wait_for = [&](const std::optional<Rational>& t) {
            if (!t) return false;
            if (*t > now_) {
                wake = wake ? rational_min(*wake, *t) : *t;
                return false;
            }
            return true;
        };
        if (a.task > 0 && !wait_for(released(a.task - 1, a.frame))) return Gate::Waiting;
        if (a.task == 0 && cfg_.one_in_flight && a.frame > 0 &&
            !wait_for(released(static_cast<int>(app_.size()) - 1, a.frame - 1))) {
            return Gate::Waiting;
        }
        if (occupancy_ + bytes_needed(a) > platform_.buffer_capacity_bytes) return Gate::BufferFull;
        return Gate::Ready;
    }

    void start_ready_work() {
        for (std::size_t r = 0; r < state_.size(); ++r) {
            RegionState& rs = state_[r];
            if (rs.state != State::Idle || rs.next >= script(r).size() || now_ < rs.ready_at) continue;
            const Action& a = script(r)[rs.next];
            if (a.load) {
                rs.state = State::Queued;
                pr_queue_.push_back(r);
                continue;
            }
            std::optional<Rational> unused;
            if (run_gate(rs, a, unused) != Gate::Ready) continue;
            occupancy_ += bytes_needed(a);
            out_.peak_buffer = std::max(out_.peak_buffer, occupancy_);
            rs.state = State::Running;
            rs.current = a;
            rs.remaining = cfg_.duration_ms[static_cast<std::size_t>(a.task)];
            rs.run_start = now_;
            emit(EventKind::RunStart, r, a.task, a.frame);
        }
        if (!pr_owner_ && !pr_queue_.empty()) {
            const std::size_t r = pr_queue_.front();
            pr_queue_.pop_front();
            RegionState& rs = state_[r];
            rs.state = State::Reconfiguring;
            rs.current = script(r)[rs.next];
            pr_owner_ = r;
            pr_end_ = now_ + cfg_.pr_ms;
            emit(EventKind::PrStart, r, rs.current.task, rs.current.frame);
        }
    }

    Rational rate() const {
        if (!cfg_.contention) return Rational(1);
        Rational demand;
        for (const auto& rs : state_) {
            if (rs.state == State::Running) demand += cfg_.bandwidth[static_cast<std::size_t>(rs.current.task)];
        }
        if (demand > cfg_.bandwidth_total) return cfg_.bandwidth_total / demand;
        return Rational(1);
    }

    std::optional<Rational> next_event_time() {
        std::optional<Rational> next;
        auto consider = [&](const Rational& t) { next = next ? rational_min(*next, t) : t; };
        if (pr_owner_) consider(pr_end_);
        const Rational current_rate = rate();
        for (std::size_t r = 0; r < state_.size(); ++r) {
            const RegionState& rs = state_[r];
            if (rs.state == State::Running) consider(now_ + rs.remaining / current_rate);
            if (rs.state != State::Idle || rs.next >= script(r).size()) continue;
            if (rs.ready_at > now_) {
                consider(rs.ready_at);
                continue;
            }
            const Action& a = script(r)[rs.next];
            if (a.load) continue;
            std::optional<Rational> wake;
            run_gate(rs, a, wake);
            if (wake) consider(*wake);
        }
        return next;
    }

    void advance_to(const Rational& t) {
        const Rational dt = t - now_;
        if (dt > 0) {
            const Rational current_rate = rate();
            for (std::size_t r = 0; r < state_.size(); ++r) {
                if (state_[r].state != State::Running) continue;
                state_[r].remaining -= current_rate * dt;
                out_.busy_ms[r] += dt;
            }
        }
        now_ = t;
    }

    void complete_due_work() {
        if (pr_owner_ && pr_end_ == now_) {
            const std::size_t r = *pr_owner_;
            RegionState& rs = state_[r];
            emit(EventKind::PrEnd, r, rs.current.task, rs.current.frame);
            rs.loaded = rs.current.task;
            rs.state = State::Idle;
            ++rs.next;
            pr_owner_.reset();
        }
        for (std::size_t r = 0; r < state_.size(); ++r) {
            RegionState& rs = state_[r];
            if (rs.state != State::Running || rs.remaining != 0) continue;
            const Action& a = rs.current;
            emit(EventKind::RunEnd, r, a.task, a.frame);
            occupancy_ -= app_.tasks[static_cast<std::size_t>(a.task)].input_bytes;
            Rational release = now_;
            if (cfg_.lockstep) release = rational_max(now_, rs.run_start + cfg_.pr_ms);
            out_.released[static_cast<std::size_t>(a.task)][static_cast<std::size_t>(a.frame)] = release;
            rs.state = State::Idle;
            ++rs.next;
        }
    }

    void finish_or_report_stall() {
        bool done = true;
        for (std::size_t r = 0; r < state_.size(); ++r) {
            if (state_[r].state != State::Idle || state_[r].next < script(r).size()) done = false;
        }
        if (done) return;
        for (std::size_t r = 0; r < state_.size(); ++r) {
            const RegionState& rs = state_[r];
            if (rs.state != State::Idle || rs.next >= script(r).size()) continue;
            const Action& a = script(r)[rs.next];
            std::optional<Rational> unused;
            if (!a.load && run_gate(rs, a, unused) == Gate::BufferFull) {
                out_.blocked = true;
                out_.blocked_reason = "region " + std::to_string(r) + " blocked at " + to_fixed(now_, 3) +
                                      " ms: run of '" + app_.tasks[static_cast<std::size_t>(a.task)].name +
                                      "' needs " + std::to_string(bytes_needed(a)) + " buffer bytes, " +
                                      std::to_string(platform_.buffer_capacity_bytes - occupancy_) + " free";
                return;
            }
        }
        throw SimulationError("schedule deadlocked at " + to_fixed(now_, 3) + " ms");
    }

    const Application& app_;
    const Platform& platform_;
    const Schedule& schedule_;
    const PassConfig& cfg_;
    long horizon_;

    std::vector<RegionState> state_;
    std::deque<std::size_t> pr_queue_;
    std::optional<std::size_t> pr_owner_;
    Rational pr_end_;
    Rational now_;
    std::uint64_t occupancy_ = 0;
    PassResult out_;
};

Rational steady_throughput(const Strategy strategy, const Schedule& schedule, const PassResult& pass, int tasks,
                           long horizon, int batch) {
    const auto& last_task = pass.released[static_cast<std::size_t>(tasks - 1)];
    auto completion = [&](long frame) { return last_task[static_cast<std::size_t>(frame)]; };

    // Whole-run average, used when no full macro-cycle pair exists.
    auto average = [&]() -> Rational {
        Rational last;
        long done = 0;
        for (long f = 0; f < horizon; ++f) {
            if (auto c = completion(f)) {
                last = rational_max(last, *c);
                ++done;
            }
        }
        return last > 0 ? Rational(done) * Rational(1000) / last : Rational(0);
    };

    if (strategy == Strategy::Pr1 || strategy == Strategy::Prk) {
        const int regions = static_cast<int>(schedule.scripts.size());
        Rational total;
        for (int r = 0; r < regions; ++r) {
            std::vector<Rational> ends;
            for (const auto& b : schedule.batches) {
                if (b.region != r || b.last - b.first + 1 != batch) continue;
                auto c = completion(b.last);
                if (!c) return average();
                ends.push_back(*c);
            }
            if (ends.size() < 2) {
                if (ends.empty() && std::none_of(schedule.batches.begin(), schedule.batches.end(),
                                                 [&](const Batch& b) { return b.region == r; })) {
                    continue;  // region never used
                }
                return average();
            }
            total += Rational(batch) * Rational(1000) / (ends.back() - ends[ends.size() - 2]);
        }
        return total;
    }

    if (horizon >= 2) {
        auto a = completion(horizon - 2);
        auto b = completion(horizon - 1);
        if (a && b && *b > *a) return Rational(1000) / (*b - *a);
    }
    return average();
}

}  // namespace

SimResult simulate(const ExecutionPlan& plan, const Application& app, const Platform& platform, long horizon_runs,
                   const SimOptions& options) {
    if (horizon_runs < 0) throw DomainError("horizon must be >= 0");
    SimResult result;
    if (app.tasks.empty() || horizon_runs == 0) {
        result.completed_runs.assign(app.size(), 0);
        return result;
    }
    check_feasible(plan, app, platform);

    const int tasks = static_cast<int>(app.size());
    const int regions = region_count(plan);
    const Rational pr_ms = plan.strategy == Strategy::Asic ? Rational(0) : pr_time_ms(region_fraction(plan), platform);

    PassConfig base;
    base.pr_ms = pr_ms;
    base.lockstep = plan.strategy == Strategy::Pr2;
    // Pr2 interleaves one continuous chain: one region computes while the other reconfigures.
    base.one_in_flight = plan.strategy == Strategy::Pr2 ||
                         (plan.strategy == Strategy::Asic && !options.asic_pipelined);
    base.contention = options.bandwidth_contention;
    base.bandwidth_total = platform.mem_bandwidth_mbps;
    for (const auto& v : plan.assignment.variants) base.bandwidth.push_back(v.bandwidth_mbps);

    // Probe: one frame, each run lasting the variant's latency.
    PassConfig probe_cfg = base;
    for (const auto& v : plan.assignment.variants) probe_cfg.duration_ms.push_back(v.latency_ms);
    const Schedule probe_schedule = build_schedule(plan.strategy, regions, tasks, 1, plan.batch);
    PassResult probe = Engine(app, platform, probe_schedule, probe_cfg, 1).run();
    if (probe.blocked) {
        result.blocked = true;
        result.blocked_reason = probe.blocked_reason;
        result.completed_runs.assign(app.size(), 0);
        return result;
    }
    result.first_run_latency_ms = *probe.released.back().front();

    // Horizon pass: runs issued at the throughput-bound interval.
    PassConfig main_cfg = base;
    const bool one_frame_in_flight_asic = plan.strategy == Strategy::Asic && !options.asic_pipelined;
    for (const auto& v : plan.assignment.variants) {
        if (one_frame_in_flight_asic) {
            main_cfg.duration_ms.push_back(v.latency_ms);
        } else if (options.bandwidth_contention) {
            main_cfg.duration_ms.push_back(Rational(1000) / v.throughput_fps);
        } else {
            main_cfg.duration_ms.push_back(Rational(1000) / effective_throughput(v, platform));
        }
    }
    if (plan.strategy == Strategy::Prk) {
        const Stagger stagger = stagger_offsets(regions, main_cfg.duration_ms, pr_ms, plan.batch);
        main_cfg.offsets_ms = stagger.offsets;
        result.stagger_contention_free = stagger.contention_free;
    }
    const Schedule schedule = build_schedule(plan.strategy, regions, tasks, horizon_runs, plan.batch);
    PassResult pass = Engine(app, platform, schedule, main_cfg, horizon_runs).run();

    result.timeline = std::move(pass.timeline);
    result.makespan_ms = pass.makespan;
    result.peak_buffer_bytes = std::max(pass.peak_buffer, probe.peak_buffer);
    result.blocked = pass.blocked;
    result.blocked_reason = pass.blocked_reason;
    result.stagger_offsets_ms = main_cfg.offsets_ms;
    result.stagger_offsets_ms.resize(static_cast<std::size_t>(regions));
    for (const auto& busy : pass.busy_ms) {
        result.busy_fraction.push_back(pass.makespan > 0 ? busy / pass.makespan : Rational(0));
    }
    for (const auto& per_task : pass.released) {
        result.completed_runs.push_back(
            static_cast<long>(std::count_if(per_task.begin(), per_task.end(), [](const auto& t) { return t.has_value(); })));
    }
    if (!pass.blocked) {
        result.steady_throughput_fps = steady_throughput(plan.strategy, schedule, pass, tasks, horizon_runs, plan.batch);
    }
    return result;
}

DeltaReport compare(const SimResult& sim, const PerformanceEstimate& estimate, const Rational& tolerance) {
    DeltaReport d;
    d.latency_abs_ms = sim.first_run_latency_ms - estimate.latency_ms;
    d.throughput_abs_fps = sim.steady_throughput_fps - estimate.throughput_fps;
    auto rel = [](const Rational& delta, const Rational& reference) -> Rational {
        if (reference == 0) return delta == 0 ? Rational(0) : Rational(1);
        return boost::multiprecision::abs(delta) / boost::multiprecision::abs(reference);
    };
    d.latency_rel = rel(d.latency_abs_ms, estimate.latency_ms);
    d.throughput_rel = rel(d.throughput_abs_fps, estimate.throughput_fps);
    d.latency_exceeds = d.latency_rel > tolerance;
    d.throughput_exceeds = d.throughput_rel > tolerance;
    return d;
}

std::optional<std::vector<Rational>> contention_free_stagger(const ExecutionPlan& plan, const Platform& platform) {
    check_plan(plan);
    if (plan.strategy != Strategy::Prk) throw PlanError("stagger offsets apply to prk plans only");
    std::vector<Rational> duration;
    for (const auto& v : plan.assignment.variants) duration.push_back(Rational(1000) / effective_throughput(v, platform));
    Stagger s = stagger_offsets(plan.k, duration, pr_time_ms(region_fraction(plan), platform), plan.batch);
    if (!s.contention_free) return std::nullopt;
    return s.offsets;
}

std::string timeline_csv(const std::vector<Event>& timeline) {
    std::ostringstream out;
    out << "time_ms,kind,region,task,run\n";
    for (const auto& e : timeline) {
        out << to_fixed(e.time_ms, 6) << ',' << to_string(e.kind) << ',' << e.region_id << ',' << e.task_name << ','
            << e.run_index << '\n';
    }
    return out.str();
}

}  // namespace prfront
