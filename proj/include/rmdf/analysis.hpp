#ifndef RMDF_ANALYSIS_HPP
#define RMDF_ANALYSIS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmdf/exec.hpp"
#include "rmdf/model.hpp"
#include "rmdf/modes.hpp"
#include "rmdf/validate.hpp"

namespace rmdf {

struct analysis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Channels x actors matrix of signed rates: +rate where the actor produces
// on the channel, -rate where it consumes. A self-loop contributes one net
// entry (production minus consumption).
struct TopologyMatrix {
    std::vector<std::string> channel_ids;  // row order
    std::vector<std::string> actor_ids;    // column order
    std::vector<std::vector<Rational>> entries;
};

// Requires a spec without parametric rates (substitute a mode or set all
// parameters to 1 first).
TopologyMatrix build_topology_matrix(const Spec& spec);

struct RepetitionVector {
    std::map<std::string, std::int64_t> counts;    // minimal positive integers
    std::optional<Rational> hyperperiod_ms;        // present when timed actors exist
};

struct ConsistencyResult {
    bool consistent = false;
    RepetitionVector repetition;
    std::string witness;  // conflicting channel or timed-actor pair on failure
};

// Solves the balance equations by propagating rate ratios over the weakly
// connected graph, scales the solution to minimal integers, then checks all
// timed actors agree on one hyperperiod counts[v] * period_v.
ConsistencyResult consistency(const Spec& spec);

struct LivenessResult {
    bool live = false;
    std::string deadlock;    // stuck-state description when not live
    bool state_restored = false;
    Trace trace;
};

// Symbolically executes one hyperperiod (repetition[v] jobs per actor) and
// checks the token state returns to its initial signature.
LivenessResult liveness(const Spec& spec, const RepetitionVector& repetition,
                        DeciderPolicy policy = nullptr);

struct ModeAnalysis {
    ModeAssignment mode;
    bool consistent = false;
    RepetitionVector repetition;
    std::string consistency_witness;
    bool live = false;
    std::string deadlock;
};

struct AnalysisReport {
    std::string spec_name;
    std::vector<Violation> structural;
    std::vector<Violation> mode_coherence;
    std::vector<ModeAnalysis> modes;

    bool structurally_valid() const { return structural.empty(); }
    bool mode_coherent() const { return mode_coherence.empty(); }
    bool all_consistent() const;
    bool all_live() const;
    bool ok() const {
        return structurally_valid() && mode_coherent() && all_consistent() && all_live();
    }
};

// The full pipeline: structure, mode coherence, then per-mode consistency
// and liveness on every enumerated mode specification.
AnalysisReport analyze_rmdf(const Spec& spec);

// Executes len(mode_sequence) hyperperiods of an RMDF spec, the k-th under
// mode_sequence[k]; per-actor targets are the sums of the per-mode
// repetition counts. Used by the mode-change-protocol checks.
RunResult run_modal(const Spec& spec, const std::vector<ModeAssignment>& mode_sequence,
                    ExecOptions options = {});

} // namespace rmdf

#endif
