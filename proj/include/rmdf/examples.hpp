#ifndef RMDF_EXAMPLES_HPP
#define RMDF_EXAMPLES_HPP

#include <string>
#include <vector>

#include "rmdf/model.hpp"

namespace rmdf {

// The specifications bundled with the toolkit: the routing-actor removal
// pairs, the three-branch mode-dependent running example with its five
// broken variants, and the Ingenuity vision-pipeline specs (plain routed,
// mode-dependent, and the modified one with the 500 Hz motor actor and the
// measured execution-time parameterization).
std::vector<std::string> example_names();
Spec example_spec(const std::string& name);
std::vector<std::pair<std::string, Spec>> bundled_examples();

} // namespace rmdf

#endif
