#ifndef RMDF_EXEC_HPP
#define RMDF_EXEC_HPP

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmdf/model.hpp"
#include "rmdf/modes.hpp"

namespace rmdf {

struct exec_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A symbolic token. Data tokens carry their provenance (producing actor and
// job index, or the channel they were seeded on as initial credit); control
// tokens carry the mode assignment chosen by the decider.
struct Token {
    enum class Kind { Data, Control } kind = Kind::Data;
    std::string origin;       // producing actor, or "~init:<channel>" for seeds
    std::int64_t index = 0;   // producing job / seed position
    ModeAssignment mode;      // control payload

    bool operator==(const Token& o) const {
        return kind == o.kind && origin == o.origin && index == o.index && mode == o.mode;
    }
};

struct ControlledActorState {
    bool has_consumed_ctrl_tkn = false;
    std::optional<int> pending_selection;  // data port chosen by the control token
    ModeAssignment pending_mode;
};

struct TokenState {
    std::map<std::string, std::deque<Token>> queues;   // channel id -> FIFO
    std::map<std::string, std::int64_t> job_counters;  // actor -> completed jobs
    std::map<std::string, ControlledActorState> controlled;
};

// Queue lengths plus controlled-actor phase; two states with equal
// signatures are indistinguishable for consistency purposes.
std::map<std::string, std::int64_t> state_signature(const TokenState& state);

struct TraceEvent {
    std::int64_t step;     // global movement counter
    std::string actor;
    std::int64_t job;      // 1-based job index this movement belongs to
    std::string channel;
    Token token;
    bool consumed;         // false = produced
};
using Trace = std::vector<TraceEvent>;

// Supplies a mode decision for the firing_index-th execution of a decider.
using DeciderPolicy =
    std::function<ModeAssignment(const std::string& decider, std::int64_t firing_index)>;

DeciderPolicy fixed_port_policy(const Spec& spec, int port);
DeciderPolicy mode_sequence_policy(std::vector<ModeAssignment> sequence);

struct ExecOptions {
    DeciderPolicy policy;
    std::vector<std::string> sweep_order;  // defaults to actor ids, sorted
    // Fault-injection hook for the mode-change-protocol checks: a controlled
    // joiner takes whatever input is available instead of honoring the port
    // its control token selected.
    bool eager_controlled_joiners = false;
};

// One owner per state; steps mutate in place.
class Executor {
public:
    Executor(const Spec& spec, ExecOptions options = {});

    const Spec& spec() const { return spec_; }
    TokenState& state() { return state_; }
    const TokenState& state() const { return state_; }
    const Trace& trace() const { return trace_; }

    // An actor is eligible when its next step can move tokens: a usual
    // actor has its per-job input counts available on every input, a
    // controlled actor can advance its two-phase alternation, a decider has
    // a data token and a policy.
    bool eligible(const std::string& actor) const;

    // Executes one step of `actor` (one phase for controlled actors, one
    // full job otherwise). Throws exec_error when the actor is ineligible.
    void step(const std::string& actor);

    // Sweeps all actors in order, firing each eligible one once; restarts
    // while progress is made. `targets` caps firings per actor (jobs, not
    // phases); actors absent from `targets` are unbounded. Returns true if
    // every target was met.
    bool run_to_targets(const std::map<std::string, std::int64_t>& targets);

    // Fires non-timed actors until no more can execute (offline fixpoint).
    // Timed actors never fire offline: their jobs belong to wall-clock time.
    // Throws exec_error when `step_budget` total jobs are exceeded.
    void run_offline_fixpoint(std::int64_t step_budget);

    std::string describe_stuck(const std::map<std::string, std::int64_t>& targets) const;

private:
    struct ChannelInfo;
    const ChannelInfo& info(const std::string& channel) const;
    std::int64_t need_at(const Channel& c, std::int64_t job) const;
    std::int64_t produce_at(const Channel& c, std::int64_t job) const;
    int positional_port(const std::vector<const Channel*>& ports, bool production,
                        std::int64_t job) const;
    int resolve_selected_port(const Actor& actor, const ModeAssignment& mode) const;
    void push(const std::string& actor, std::int64_t job, const Channel& c, Token t);
    Token pop(const std::string& actor, std::int64_t job, const Channel& c);

    Spec spec_;
    ExecOptions options_;
    TokenState state_;
    Trace trace_;
    std::int64_t movement_counter_ = 0;
    std::map<std::string, std::int64_t> decider_firings_;
};

TokenState initial_state(const Spec& spec);

struct RunResult {
    bool completed = false;
    TokenState final_state;
    Trace trace;
    std::string diagnosis;  // stuck-state description on deadlock
};

// Fires each actor `targets[actor]` times in data-driven order; a deadlock
// (no eligible actor before completion) is reported, not thrown.
RunResult run_to_completion(const Spec& spec, const std::map<std::string, std::int64_t>& targets,
                            ExecOptions options = {});

struct PreprocessResult {
    Spec spec;  // initial tokens rewritten to the offline fixpoint
    std::map<std::string, std::int64_t> offline_jobs;
    TokenState state;
    std::int64_t total_offline = 0;
};

// Executes every job that only depends on initial tokens (never the timed
// actors). step_budget <= 0 derives 10x the repetition-vector sum from the
// consistency analysis. The returned spec carries the fixpoint queue
// contents as whole initial tokens; original fractional credits are kept.
// When offline jobs executed, analyses that evaluate token patterns must
// also apply the returned job-counter offsets.
PreprocessResult preprocess(const Spec& spec, DeciderPolicy policy = nullptr,
                            std::int64_t step_budget = 0);

struct McpReport {
    bool non_overlapping = true;
    bool periodic = true;
    bool late_retirement = true;
    std::vector<std::string> notes;

    bool all_hold() const { return non_overlapping && periodic && late_retirement; }
};

// Checks the three mode-change-protocol properties on executor traces:
// (a) between consecutive control tokens of a controlled splitter, routed
//     data tokens enter exactly one branch;
// (b) firing counts of actors outside every control area agree across the
//     supplied traces (which should cover different mode sequences of equal
//     length);
// (c) each data token a controlled joiner moves comes from the port its
//     governing control token selected.
McpReport check_mcp_properties(const Spec& spec, const std::vector<Trace>& traces,
                               const std::vector<ControlArea>& areas);

} // namespace rmdf

#endif
