#ifndef RMDF_MODES_HPP
#define RMDF_MODES_HPP

#include <set>
#include <string>
#include <vector>

#include "rmdf/model.hpp"
#include "rmdf/validate.hpp"

namespace rmdf {

struct mode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The set of actors conditioned by one mode decider: everything strictly
// between its controlled splitters and controlled joiners. The decider, its
// duplicater and the controlled actors are border actors, not members.
struct ControlArea {
    std::string decider;
    std::vector<std::string> duplicaters;
    std::vector<std::string> controlled_splitters;
    std::vector<std::string> controlled_joiners;
    std::set<std::string> members;
    // one (parameter, actors) entry per controlled-splitter output branch
    std::vector<std::pair<std::string, std::vector<std::string>>> branches;

    bool is_border(const std::string& actor) const;
};

// One ControlArea per mode decider, via the path characterization
// (reachable from a controlled splitter and reaching a controlled joiner).
// Throws mode_error when a decider's control tokens reach no controlled
// actor, or when areas nest.
std::vector<ControlArea> compute_control_areas(const Spec& spec);

struct ModeDependencyResult {
    bool single = true;
    std::string witness_channel;  // first channel acquiring two labels
};

// Forward labeling of every control-area channel by its conditioning branch;
// coherent specs label each channel exactly once. Intra-branch cycles (other
// than self-loops, which are skipped) are rejected with mode_error.
ModeDependencyResult check_single_mode_dependency(const Spec& spec);

// All five control-area restrictions. Rule ids R1..R5:
//   R1 single mode dependency, R2 no boundary-crossing channel,
//   R3 uniform frequency inside an area, R4 rates inside an area are 0/1,
//   R5 assigned parametric rates of each controlled actor sum to 1 per mode.
// The empty list means the spec is mode-coherent.
std::vector<Violation> check_mode_coherence(const Spec& spec);

// Replaces every parametric rate by its 0/1 value under the given mode,
// removes channels whose rate became 0, and prunes actors left without a
// live path between their controlled splitter and joiner.
Spec substitute_mode(const Spec& spec, const ModeAssignment& mode);

// One substituted spec per mode-table row; a spec without parameters yields
// a singleton list with the original.
std::vector<std::pair<ModeAssignment, Spec>> enumerate_mode_specs(const Spec& spec);

} // namespace rmdf

#endif
