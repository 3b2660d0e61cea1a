#ifndef RMDF_VALIDATE_HPP
#define RMDF_VALIDATE_HPP

#include <string>
#include <vector>

#include "rmdf/model.hpp"

namespace rmdf {

// A violated structural or coherence rule. Violations are data, not
// exceptions: callers collect them and decide what to do.
struct Violation {
    std::string rule;      // stable rule id, e.g. "splitter-output-sum" or "R3"
    std::string element;   // offending actor/channel id
    std::string observed;  // observed value, exact, possibly empty
    std::string message;
};

// Checks every structural invariant of the graph model: arities and rate
// rules of routing actors, parametric-rate placement, control-channel
// placement, port density, weak connectivity, bcet <= wcet, and friends.
// Pure; returns the empty list iff the spec is structurally valid.
std::vector<Violation> validate_structure(const Spec& spec);

bool weakly_connected(const Spec& spec);

} // namespace rmdf

#endif
