#ifndef RMDF_REPORT_HPP
#define RMDF_REPORT_HPP

#include <string>
#include <vector>

#include "rmdf/analysis.hpp"
#include "rmdf/timing.hpp"
#include "rmdf/validate.hpp"

namespace rmdf {

enum class ReportFormat { Table, Json, Csv };

ReportFormat report_format_from_name(const std::string& name);

// All renderers are deterministic: stable ordering (actor id, then job),
// exact "p/q" rationals, JSON schema tagged rmdf-report/1. Tables add a
// decimal hint next to each rational.
std::string render_violations(const std::vector<Violation>& violations, ReportFormat format);
std::string render_analysis(const AnalysisReport& report, ReportFormat format);
std::string render_windows(const WindowTable& table, ReportFormat format);
std::string render_feasibility(const FeasibilityResult& result, ReportFormat format);
std::string render_max_wcet(const std::map<std::string, TimeBound>& bounds, ReportFormat format);

} // namespace rmdf

#endif
