#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmdf/analysis.hpp"
#include "rmdf/desugar.hpp"
#include "rmdf/examples.hpp"
#include "rmdf/io.hpp"
#include "rmdf/rate.hpp"
#include "rmdf/report.hpp"
#include "rmdf/timing.hpp"

namespace py = pybind11;
using namespace rmdf;

namespace {

py::object json_loads(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

py::object analyze_py(const Spec& spec) {
    return json_loads(render_analysis(analyze_rmdf(spec), ReportFormat::Json));
}

py::object check_py(const Spec& spec) {
    auto violations = validate_structure(spec);
    if (violations.empty()) {
        auto coherence = check_mode_coherence(spec);
        violations.insert(violations.end(), coherence.begin(), coherence.end());
    }
    return json_loads(render_violations(violations, ReportFormat::Json));
}

py::object windows_py(const Spec& spec) {
    PreprocessResult pre = preprocess(spec);
    TimingEngine engine(spec, pre.offline_jobs);
    return json_loads(render_windows(engine.window_table(), ReportFormat::Json));
}

py::object feasibility_py(const Spec& spec) {
    PreprocessResult pre = preprocess(spec);
    TimingEngine engine(spec, pre.offline_jobs);
    return json_loads(render_feasibility(engine.feasibility(), ReportFormat::Json));
}

py::object max_wcet_py(const Spec& spec) {
    PreprocessResult pre = preprocess(spec);
    TimingEngine engine(spec, pre.offline_jobs);
    return json_loads(render_max_wcet(engine.max_feasible_wcet(), ReportFormat::Json));
}

py::object window_py(const Spec& spec, const std::string& actor, std::int64_t job) {
    PreprocessResult pre = preprocess(spec);
    TimingEngine engine(spec, pre.offline_jobs);
    py::dict out;
    out["actor"] = actor;
    out["job"] = job;
    out["release"] = engine.release(actor, job).str();
    TimeBound dl = engine.deadline(actor, job);
    out["deadline"] = dl.unbounded ? py::object(py::none()) : py::object(py::str(dl.value.str()));
    return out;
}

} // namespace

PYBIND11_MODULE(_rmdf, m) {
    m.doc() = "Static analysis of mode-dependent real-time dataflow specifications";

    py::class_<Spec>(m, "Spec")
        .def_property_readonly("name", [](const Spec& s) { return s.name; })
        .def_property_readonly("actor_ids",
                               [](const Spec& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& a : s.actors) ids.push_back(a.id);
                                   return ids;
                               })
        .def_property_readonly("channel_ids",
                               [](const Spec& s) {
                                   std::vector<std::string> ids;
                                   for (const auto& c : s.channels) ids.push_back(c.id);
                                   return ids;
                               })
        .def_property_readonly("mode_count",
                               [](const Spec& s) { return s.mode_table.modes.size(); })
        .def("__repr__", [](const Spec& s) {
            return "<rmdf.Spec '" + s.name + "' " + std::to_string(s.actors.size()) + " actors, " +
                   std::to_string(s.channels.size()) + " channels>";
        });

    m.def("parse_spec", &parse_spec, py::arg("text"));
    m.def("serialize_spec", &serialize_spec, py::arg("spec"));
    m.def("load_spec", &load_spec_file, py::arg("path"));
    m.def("example_names", &example_names);
    m.def("example_spec", &example_spec, py::arg("name"));

    m.def("check", &check_py, py::arg("spec"),
          "Structural validation plus mode coherence; returns the violation report.");
    m.def("analyze", &analyze_py, py::arg("spec"),
          "Consistency and liveness of every mode specification.");
    m.def("desugar", [](const Spec& s) { return remove_routing_actors(s); }, py::arg("spec"));
    m.def("timing_windows", &windows_py, py::arg("spec"),
          "Release/deadline windows of the first hyperperiod.");
    m.def("window", &window_py, py::arg("spec"), py::arg("actor"), py::arg("job"),
          "One lazily evaluated execution window.");
    m.def("feasibility", &feasibility_py, py::arg("spec"));
    m.def("max_feasible_wcet", &max_wcet_py, py::arg("spec"));

    m.def("tokens_at_job",
          [](std::int64_t job, const std::string& rate, const std::string& init) {
              return tokens_at_job(job, Rational::parse(rate), Rational::parse(init));
          },
          py::arg("job"), py::arg("rate"), py::arg("init") = "0");
    m.def("rate_from_sequence",
          [](const std::vector<std::int64_t>& seq, const std::string& direction) -> py::object {
              auto r = direction == "cons" ? rate_init_from_consumption_sequence(seq)
                                           : rate_init_from_production_sequence(seq);
              if (!r) return py::none();
              return py::make_tuple(r->rate.str(), r->initial_tokens.str());
          },
          py::arg("seq"), py::arg("direction") = "prod");

    py::register_exception<parse_error>(m, "ParseError");
}
