#ifndef RMDF_DESUGAR_HPP
#define RMDF_DESUGAR_HPP

#include <string>
#include <vector>

#include "rmdf/model.hpp"

namespace rmdf {

struct desugar_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rewrites a routed specification into an equivalent plain one:
// splitters, joiners, duplicaters and discards disappear, and the cyclic
// port-order service pattern of each removed actor is re-encoded as
// fractional initial tokens on the replacement channels.
//
// For a splitter output serving jobs [o+1, o+n_k] of a q-job cycle, the
// replacement channel keeps the output's production rate n_k/q and gets the
// initial-token credit that makes the predecessor's production pattern equal
// that service pattern; joiners are the dual on the consumption side. Whole
// initial tokens on splitter outputs / joiner inputs are preserved;
// fractional parts are recomputed from the port order (they are redundant
// annotations of the same service pattern).
//
// Requires a structurally valid spec without controlled actors or mode
// deciders. Channels entering a splitter (or leaving a joiner) must carry
// rate 1 on the far side and no initial tokens; in particular a splitter
// feeding a splitter (or joiner feeding joiner) is rejected, since the
// composed delivery pattern is not expressible as one rational rate.
// Dead branches (e.g. a duplicater output ending in a discard) produce a
// warning.
Spec remove_routing_actors(const Spec& spec, std::vector<std::string>* warnings = nullptr);

} // namespace rmdf

#endif
