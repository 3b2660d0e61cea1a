#ifndef RMDF_TIMING_HPP
#define RMDF_TIMING_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rmdf/analysis.hpp"
#include "rmdf/model.hpp"

namespace rmdf {

struct timing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A deadline is either a finite instant or unbounded (no timed descendant
// constrains the job). Never a sentinel number.
struct TimeBound {
    bool unbounded = false;
    Rational value;

    static TimeBound finite(Rational v) { return TimeBound{false, std::move(v)}; }
    static TimeBound infinite() { return TimeBound{true, Rational(0)}; }

    bool operator==(const TimeBound& o) const {
        return unbounded == o.unbounded && (unbounded || value == o.value);
    }
    std::string str() const { return unbounded ? "unbounded" : value.str(); }
};

struct ExecutionWindow {
    std::string actor;
    std::int64_t job = 0;  // 1-based
    Rational release;
    TimeBound deadline;

    // release > deadline is exactly a feasibility counterexample
    TimeBound length() const {
        return deadline.unbounded ? TimeBound::infinite() : TimeBound::finite(deadline.value - release);
    }
};

struct WindowTable {
    Rational hyperperiod_ms;
    std::map<std::string, std::int64_t> repetition;
    std::vector<ExecutionWindow> windows;  // jobs 1..q_v per actor, actor-major
};

struct FeasibilityViolation {
    std::string actor;
    std::int64_t job;
    Rational wcet;
    Rational release;
    TimeBound deadline;
};

struct FeasibilityResult {
    bool feasible = true;
    std::vector<FeasibilityViolation> violations;
};

// Derives per-job execution windows of a well-defined specification by lazy
// arithmetic propagation: a job's release is pushed forward from the
// producer jobs it consumes (plus its own best-case predecessors), its
// deadline pulled backward from the consumer jobs of its outputs, and timed
// actors clamp both with their period and phase. Parametric rates are set
// to 1 (the conservative reading), and only the (actor, job) cells a query
// transitively needs are ever evaluated.
//
// Construction requires: structurally valid, consistent with at least one
// timed actor, untimed actors between timed sources and sinks, bcet/wcet on
// every non-routing actor (routing actors default to zero cost). Liveness
// is a documented precondition, not re-verified here.
//
// `offsets` are pre-processing job offsets: offsets[v] = k means runtime job
// n of v is the (n+k)-th job of the written specification. Timed actors
// never carry offsets.
//
// Queries memoize into an internal table, so concurrent use of one engine
// must be externally serialized; results do not depend on query order.
class TimingEngine {
public:
    explicit TimingEngine(const Spec& spec, std::map<std::string, std::int64_t> offsets = {});

    Rational release(const std::string& actor, std::int64_t job);
    TimeBound deadline(const std::string& actor, std::int64_t job);

    // All windows of the first hyperperiod. Verifies the memoized table is
    // a fixpoint of the propagation equations and that job q_v + 1 equals
    // job 1 shifted by one hyperperiod.
    WindowTable window_table();

    FeasibilityResult feasibility();

    // Per actor: min over first-hyperperiod jobs of (deadline - release),
    // the largest WCET the necessary feasibility condition admits.
    std::map<std::string, TimeBound> max_feasible_wcet();

    const RepetitionVector& repetition() const { return repetition_; }
    Rational hyperperiod_ms() const { return *repetition_.hyperperiod_ms; }

    // Memo misses (cells actually evaluated); exposes the laziness of the
    // propagation.
    std::int64_t cells_evaluated() const { return cells_evaluated_; }
    std::int64_t total_first_hyperperiod_cells() const;

private:
    struct Key {
        std::string actor;
        std::int64_t job;
        bool operator<(const Key& o) const {
            return actor < o.actor || (actor == o.actor && job < o.job);
        }
    };

    Rational release_raw(const Actor& a, std::int64_t job);
    TimeBound deadline_raw(const Actor& a, std::int64_t job);
    const ExecTime& exec_of(const std::string& actor) const;
    std::int64_t offset_of(const std::string& actor) const;

    Spec spec_;  // parametric rates already set to 1
    std::map<std::string, std::int64_t> offsets_;
    RepetitionVector repetition_;
    std::map<std::string, ExecTime> exec_;
    std::map<Key, Rational> release_memo_;
    std::map<Key, TimeBound> deadline_memo_;
    std::set<Key> release_stack_;
    std::set<Key> deadline_stack_;
    std::int64_t cells_evaluated_ = 0;
};

} // namespace rmdf

#endif
