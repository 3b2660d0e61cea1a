#include "rmdf/timing.hpp"

#include <algorithm>

#include "rmdf/validate.hpp"

namespace rmdf {

namespace {

Rational rational_ceil(const Rational& x) { return Rational(x.ceil()); }
Rational rational_floor(const Rational& x) { return Rational(x.floor()); }

} // namespace

TimingEngine::TimingEngine(const Spec& spec, std::map<std::string, std::int64_t> offsets)
    : spec_(with_all_params_one(spec)), offsets_(std::move(offsets)) {
    auto violations = validate_structure(spec_);
    if (!violations.empty())
        throw timing_error("structure invalid: " + violations.front().rule + " on '" +
                           violations.front().element + "'");
    auto verdict = consistency(spec_);
    if (!verdict.consistent)
        throw timing_error("specification is inconsistent: " + verdict.witness);
    repetition_ = verdict.repetition;
    if (!repetition_.hyperperiod_ms)
        throw timing_error("timing analysis needs at least one timed actor");

    for (const auto& a : spec_.actors) {
        if (a.exec_time) {
            exec_[a.id] = *a.exec_time;
        } else if (is_plain_routing(a.kind) || is_controlled(a.kind)) {
            exec_[a.id] = ExecTime{Rational(0), Rational(0)};  // zero-cost routing
        } else {
            throw timing_error("actor '" + a.id + "' has no bcet/wcet");
        }
        if (spec_.inputs_of(a.id).empty() && !a.is_timed())
            throw timing_error("source actor '" + a.id + "' must be timed (sensor)");
        if (spec_.outputs_of(a.id).empty() && !a.is_timed())
            throw timing_error("sink actor '" + a.id + "' must be timed (actuator)");
        if (a.is_timed() && offset_of(a.id) != 0)
            throw timing_error("timed actor '" + a.id + "' cannot have an offline job offset");
    }
}

const ExecTime& TimingEngine::exec_of(const std::string& actor) const { return exec_.at(actor); }

std::int64_t TimingEngine::offset_of(const std::string& actor) const {
    auto it = offsets_.find(actor);
    return it == offsets_.end() ? 0 : it->second;
}

Rational TimingEngine::release(const std::string& actor, std::int64_t job) {
    if (job < 1) throw timing_error("job index must be >= 1");
    const Actor* a = spec_.find_actor(actor);
    if (!a) throw timing_error("unknown actor '" + actor + "'");
    std::int64_t q = repetition_.counts.at(actor);
    if (job > q) {
        // constraints are cyclic over the hyperperiod
        std::int64_t cycles = (job - 1) / q;
        return release(actor, job - cycles * q) + Rational(cycles) * hyperperiod_ms();
    }
    Key key{actor, job};
    auto it = release_memo_.find(key);
    if (it != release_memo_.end()) return it->second;
    if (release_stack_.count(key))
        throw timing_error("release re-entry on " + actor + "#" + std::to_string(job));
    release_stack_.insert(key);
    ++cells_evaluated_;
    Rational value;
    try {
        value = release_raw(*a, job);
    } catch (...) {
        release_stack_.erase(key);
        throw;
    }
    release_stack_.erase(key);
    release_memo_[key] = value;
    return value;
}

// Release of job `job` (runtime index) of `a`: the producer job that emits
// the last token this job consumes must complete, then any sibling jobs
// enabled by the same producer job run back to back at best case. A timed
// actor is released by its clock alone, period * (job-1) + phase; whether
// data arrives by that grid point is the feasibility test's concern.
Rational TimingEngine::release_raw(const Actor& a, std::int64_t job) {
    if (a.is_timed()) return a.timing->period_ms() * Rational(job - 1) + a.timing->phase_ms;

    bool has_bound = false;
    Rational best(0);
    auto consider = [&](const Rational& v) {
        if (!has_bound || v > best) best = v;
        has_bound = true;
    };

    std::int64_t orig_job = job + offset_of(a.id);
    for (const auto* c : spec_.inputs_of(a.id)) {
        const Rational gamma_prod = c->production_rate.value;
        const Rational gamma_cons = c->consumption_rate.value;
        const Rational init = c->initial_tokens;
        const Rational r = init.frac();
        const std::string& producer = c->producer.actor;

        // producer job that supplies this job's last token on the channel
        Rational need = rational_ceil(Rational(orig_job) * gamma_cons - r);
        Rational alpha1 = rational_ceil((need - init) / gamma_prod);
        std::int64_t alpha1_rt = alpha1.num() - offset_of(producer);
        if (alpha1_rt < 1) continue;  // covered by initial or offline tokens

        // first consumer job that needs that producer job's output
        Rational beta1 = Rational(1) +
                         rational_floor((rational_floor((alpha1 - Rational(1)) * gamma_prod + init) + r) /
                                        gamma_cons);
        Rational chain = Rational(orig_job) - beta1;  // offset-free difference
        if (release_stack_.count(Key{producer, ((alpha1_rt - 1) % repetition_.counts.at(producer)) + 1}) &&
            alpha1_rt > repetition_.counts.at(producer)) {
            // re-entry through the cyclic shift: the term cannot bind when a
            // hyperperiod of slack separates the cycle (verified afterwards)
            continue;
        }
        if (release_stack_.count(Key{producer, alpha1_rt})) continue;
        consider(release(producer, alpha1_rt) + exec_of(producer).bcet_ms +
                 chain * exec_of(a.id).bcet_ms);
    }

    if (!has_bound) {
        if (spec_.inputs_of(a.id).empty())
            throw timing_error("untimed source '" + a.id + "' has no release bound");
        return Rational(0);  // every dependency satisfied before runtime
    }
    return best;
}

TimeBound TimingEngine::deadline(const std::string& actor, std::int64_t job) {
    if (job < 1) throw timing_error("job index must be >= 1");
    const Actor* a = spec_.find_actor(actor);
    if (!a) throw timing_error("unknown actor '" + actor + "'");
    std::int64_t q = repetition_.counts.at(actor);
    if (job > q) {
        std::int64_t cycles = (job - 1) / q;
        TimeBound base = deadline(actor, job - cycles * q);
        if (base.unbounded) return base;
        return TimeBound::finite(base.value + Rational(cycles) * hyperperiod_ms());
    }
    Key key{actor, job};
    auto it = deadline_memo_.find(key);
    if (it != deadline_memo_.end()) return it->second;
    if (deadline_stack_.count(key))
        throw timing_error("deadline re-entry on " + actor + "#" + std::to_string(job));
    deadline_stack_.insert(key);
    ++cells_evaluated_;
    TimeBound value;
    try {
        value = deadline_raw(*a, job);
    } catch (...) {
        deadline_stack_.erase(key);
        throw;
    }
    deadline_stack_.erase(key);
    deadline_memo_[key] = value;
    return value;
}

// Deadline of job `job` of `a`: the first consumer job of each output must
// still be able to run, minus the worst-case work of the sibling jobs that
// must complete in between; timed actors are clamped by their own period.
TimeBound TimingEngine::deadline_raw(const Actor& a, std::int64_t job) {
    bool has_bound = false;
    Rational best(0);
    auto consider = [&](const Rational& v) {
        if (!has_bound || v < best) best = v;
        has_bound = true;
    };

    if (a.is_timed())
        consider(a.timing->period_ms() * Rational(job) + a.timing->phase_ms);

    std::int64_t orig_job = job + offset_of(a.id);
    for (const auto* c : spec_.outputs_of(a.id)) {
        const Rational gamma_prod = c->production_rate.value;
        const Rational gamma_cons = c->consumption_rate.value;
        const Rational init = c->initial_tokens;
        const Rational r = init.frac();
        const std::string& consumer = c->consumer.actor;

        // first consumer job that needs this job's output
        Rational supply_before = rational_floor(Rational(orig_job - 1) * gamma_prod + init);
        Rational alpha2 = Rational(1) + rational_floor((supply_before + r) / gamma_cons);
        std::int64_t alpha2_rt = alpha2.num() - offset_of(consumer);
        if (alpha2_rt < 1)
            throw timing_error("offline consumer job for runtime token on '" + c->id + "'");

        // producer job whose completion enables that consumer job
        Rational beta2 =
            rational_ceil((rational_ceil(alpha2 * gamma_cons - r) - init) / gamma_prod);
        Rational chain = beta2 - Rational(orig_job);  // offset-free difference

        std::int64_t qc = repetition_.counts.at(consumer);
        std::int64_t folded = ((alpha2_rt - 1) % qc) + 1;
        if (deadline_stack_.count(Key{consumer, folded}) && alpha2_rt > qc) continue;
        if (deadline_stack_.count(Key{consumer, alpha2_rt})) continue;
        TimeBound down = deadline(consumer, alpha2_rt);
        if (down.unbounded) continue;
        consider(down.value - exec_of(consumer).wcet_ms - chain * exec_of(a.id).wcet_ms);
    }

    if (!has_bound) {
        if (spec_.outputs_of(a.id).empty())
            throw timing_error("untimed sink '" + a.id + "' has no deadline bound");
        return TimeBound::infinite();
    }
    return TimeBound::finite(best);
}

std::int64_t TimingEngine::total_first_hyperperiod_cells() const {
    std::int64_t total = 0;
    for (const auto& [actor, q] : repetition_.counts) {
        (void)actor;
        total += 2 * q;  // a release and a deadline cell per job
    }
    return total;
}

WindowTable TimingEngine::window_table() {
    WindowTable table;
    table.hyperperiod_ms = hyperperiod_ms();
    table.repetition = repetition_.counts;
    std::vector<std::string> ids;
    for (const auto& a : spec_.actors) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) {
        std::int64_t q = repetition_.counts.at(id);
        for (std::int64_t n = 1; n <= q; ++n)
            table.windows.push_back({id, n, release(id, n), deadline(id, n)});
    }

    // the memoized table must be a fixpoint of the propagation equations
    // (re-entrant cycle terms were dropped during evaluation), and shifting
    // one hyperperiod must reproduce it
    for (const auto& id : ids) {
        const Actor& a = *spec_.find_actor(id);
        std::int64_t q = repetition_.counts.at(id);
        for (std::int64_t n = 1; n <= q; ++n) {
            if (release_raw(a, n) != release(id, n) || !(deadline_raw(a, n) == deadline(id, n)))
                throw timing_error("propagation fixpoint violated at " + id + "#" +
                                   std::to_string(n) + " (non-well-defined specification)");
        }
        Rational shifted_r = release_raw(a, q + 1);
        if (shifted_r != release(id, 1) + hyperperiod_ms())
            throw timing_error("release of " + id + " is not cyclic over the hyperperiod");
        TimeBound shifted_d = deadline_raw(a, q + 1);
        TimeBound base_d = deadline(id, 1);
        if (shifted_d.unbounded != base_d.unbounded ||
            (!base_d.unbounded && shifted_d.value != base_d.value + hyperperiod_ms()))
            throw timing_error("deadline of " + id + " is not cyclic over the hyperperiod");
    }
    return table;
}

FeasibilityResult TimingEngine::feasibility() {
    FeasibilityResult res;
    for (const auto& a : spec_.actors) {
        std::int64_t q = repetition_.counts.at(a.id);
        const Rational& wcet = exec_of(a.id).wcet_ms;
        for (std::int64_t n = 1; n <= q; ++n) {
            Rational rel = release(a.id, n);
            TimeBound dl = deadline(a.id, n);
            if (dl.unbounded) continue;
            if (wcet > dl.value - rel) {
                res.feasible = false;
                res.violations.push_back({a.id, n, wcet, rel, dl});
            }
        }
    }
    std::sort(res.violations.begin(), res.violations.end(),
              [](const FeasibilityViolation& x, const FeasibilityViolation& y) {
                  return x.actor < y.actor || (x.actor == y.actor && x.job < y.job);
              });
    return res;
}

std::map<std::string, TimeBound> TimingEngine::max_feasible_wcet() {
    std::map<std::string, TimeBound> out;
    for (const auto& a : spec_.actors) {
        std::int64_t q = repetition_.counts.at(a.id);
        TimeBound best = TimeBound::infinite();
        for (std::int64_t n = 1; n <= q; ++n) {
            Rational rel = release(a.id, n);
            TimeBound dl = deadline(a.id, n);
            if (dl.unbounded) continue;
            Rational window = dl.value - rel;
            if (best.unbounded || window < best.value) best = TimeBound::finite(window);
        }
        out[a.id] = best;
    }
    return out;
}

} // namespace rmdf
