#ifndef RMDF_IO_HPP
#define RMDF_IO_HPP

#include <string>

#include "rmdf/model.hpp"

namespace rmdf {

struct parse_error : std::runtime_error {
    // path is a slash-separated locator into the document, e.g.
    // "channels[3]/prod".
    parse_error(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path(path) {}
    std::string path;
};

// Reads the JSON-shaped specification format. All rationals are parsed
// exactly from their "p/q" strings. Structural validation is not applied
// here; see validate_structure.
Spec parse_spec(const std::string& text);

// Emits the same format with reduced rationals and stable field order,
// so serialize is deterministic and parse(serialize(s)) == s.
std::string serialize_spec(const Spec& spec);

Spec load_spec_file(const std::string& path);
void write_spec_file(const Spec& spec, const std::string& path);

} // namespace rmdf

#endif
