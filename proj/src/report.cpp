#include "rmdf/report.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace rmdf {

using json = nlohmann::ordered_json;

namespace {

std::string with_hint(const Rational& r) {
    if (r.is_integer()) return r.str();
    std::ostringstream out;
    out << r.str() << " (" << std::setprecision(4) << r.approx() << ")";
    return out.str();
}

std::string with_hint(const TimeBound& b) {
    return b.unbounded ? "unbounded" : with_hint(b.value);
}

struct TableWriter {
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    std::string str() const {
        std::vector<std::size_t> width;
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (width.size() <= i) width.resize(i + 1, 0);
                width[i] = std::max(width[i], row[i].size());
            }
        std::ostringstream out;
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << std::left << std::setw(static_cast<int>(width[i]) + 2) << row[i];
            }
            out << "\n";
        }
        return out.str();
    }
};

json violations_json(const std::vector<Violation>& violations) {
    json arr = json::array();
    for (const auto& v : violations)
        arr.push_back(json{{"rule", v.rule},
                           {"element", v.element},
                           {"observed", v.observed},
                           {"message", v.message}});
    return arr;
}

std::string mode_str(const ModeAssignment& mode) {
    if (mode.empty()) return "(none)";
    std::string s;
    for (const auto& [p, v] : mode) {
        if (!s.empty()) s += ",";
        s += p + "=" + std::to_string(v);
    }
    return s;
}

} // namespace

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "table") return ReportFormat::Table;
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    throw std::runtime_error("unknown format '" + name + "' (expected table, json or csv)");
}

std::string render_violations(const std::vector<Violation>& violations, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json doc;
        doc["schema"] = "rmdf-report/1";
        doc["violations"] = violations_json(violations);
        doc["ok"] = violations.empty();
        return doc.dump(2) + "\n";
    }
    if (violations.empty()) return "OK\n";
    TableWriter t;
    t.add({"rule", "element", "observed", "message"});
    for (const auto& v : violations) t.add({v.rule, v.element, v.observed, v.message});
    return t.str();
}

std::string render_analysis(const AnalysisReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json doc;
        doc["schema"] = "rmdf-report/1";
        doc["spec"] = report.spec_name;
        doc["structural"] = violations_json(report.structural);
        doc["mode_coherence"] = violations_json(report.mode_coherence);
        doc["modes"] = json::array();
        for (const auto& m : report.modes) {
            json jm;
            jm["mode"] = json::object();
            for (const auto& [p, v] : m.mode) jm["mode"][p] = v;
            jm["consistent"] = m.consistent;
            if (m.consistent) {
                jm["repetition"] = json::object();
                for (const auto& [a, n] : m.repetition.counts) jm["repetition"][a] = n;
                if (m.repetition.hyperperiod_ms)
                    jm["hyperperiod_ms"] = m.repetition.hyperperiod_ms->str();
            } else {
                jm["witness"] = m.consistency_witness;
            }
            jm["live"] = m.live;
            if (!m.live && !m.deadlock.empty()) jm["deadlock"] = m.deadlock;
            doc["modes"].push_back(std::move(jm));
        }
        doc["ok"] = report.ok();
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "spec: " << report.spec_name << "\n";
    if (!report.structural.empty()) {
        out << "structural violations:\n" << render_violations(report.structural, format);
        return out.str();
    }
    out << "structure: OK\n";
    if (!report.mode_coherence.empty()) {
        out << "mode-coherence violations:\n" << render_violations(report.mode_coherence, format);
        return out.str();
    }
    out << "mode-coherence: OK\n";
    TableWriter t;
    t.add({"mode", "consistent", "hyperperiod", "live", "detail"});
    for (const auto& m : report.modes) {
        std::string hp = m.repetition.hyperperiod_ms ? with_hint(*m.repetition.hyperperiod_ms) + " ms"
                                                     : "-";
        std::string detail = m.consistent ? (m.live ? "" : m.deadlock) : m.consistency_witness;
        t.add({mode_str(m.mode), m.consistent ? "yes" : "NO", hp, m.live ? "yes" : "NO", detail});
    }
    out << t.str();
    out << (report.ok() ? "verdict: consistent and live in every mode\n"
                        : "verdict: NOT consistent and live\n");
    return out.str();
}

std::string render_windows(const WindowTable& table, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json doc;
        doc["schema"] = "rmdf-report/1";
        doc["hyperperiod_ms"] = table.hyperperiod_ms.str();
        doc["windows"] = json::array();
        for (const auto& w : table.windows) {
            json jw;
            jw["actor"] = w.actor;
            jw["job"] = w.job;
            jw["release"] = w.release.str();
            jw["deadline"] = w.deadline.unbounded ? json(nullptr) : json(w.deadline.value.str());
            jw["window"] =
                w.deadline.unbounded ? json(nullptr) : json((w.deadline.value - w.release).str());
            doc["windows"].push_back(std::move(jw));
        }
        return doc.dump(2) + "\n";
    }
    if (format == ReportFormat::Csv) {
        std::ostringstream out;
        out << "actor,job,release,deadline,window\n";
        for (const auto& w : table.windows) {
            out << w.actor << "," << w.job << "," << w.release.str() << ",";
            if (w.deadline.unbounded)
                out << "unbounded,unbounded";
            else
                out << w.deadline.value.str() << "," << (w.deadline.value - w.release).str();
            out << "\n";
        }
        return out.str();
    }
    TableWriter t;
    t.add({"actor", "job", "release", "deadline", "window"});
    for (const auto& w : table.windows) {
        std::string win = w.deadline.unbounded ? "unbounded" : with_hint(w.deadline.value - w.release);
        t.add({w.actor, std::to_string(w.job), with_hint(w.release), with_hint(w.deadline), win});
    }
    std::ostringstream out;
    out << "hyperperiod: " << with_hint(table.hyperperiod_ms) << " ms\n" << t.str();
    return out.str();
}

std::string render_feasibility(const FeasibilityResult& result, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json doc;
        doc["schema"] = "rmdf-report/1";
        doc["feasible"] = result.feasible;
        doc["violations"] = json::array();
        for (const auto& v : result.violations)
            doc["violations"].push_back(json{{"actor", v.actor},
                                             {"job", v.job},
                                             {"wcet", v.wcet.str()},
                                             {"release", v.release.str()},
                                             {"deadline", v.deadline.str()},
                                             {"window", (v.deadline.value - v.release).str()}});
        return doc.dump(2) + "\n";
    }
    if (result.feasible) return "feasible: every execution window admits its actor's WCET\n";
    TableWriter t;
    t.add({"actor", "job", "wcet", "window", "release", "deadline"});
    for (const auto& v : result.violations)
        t.add({v.actor, std::to_string(v.job), with_hint(v.wcet),
               with_hint(v.deadline.value - v.release), with_hint(v.release), with_hint(v.deadline)});
    return "INFEASIBLE: windows shorter than the WCET\n" + t.str();
}

std::string render_max_wcet(const std::map<std::string, TimeBound>& bounds, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json doc;
        doc["schema"] = "rmdf-report/1";
        doc["max_feasible_wcet_ms"] = json::object();
        for (const auto& [actor, b] : bounds)
            doc["max_feasible_wcet_ms"][actor] = b.unbounded ? json(nullptr) : json(b.value.str());
        return doc.dump(2) + "\n";
    }
    TableWriter t;
    t.add({"actor", "max feasible wcet"});
    for (const auto& [actor, b] : bounds) t.add({actor, with_hint(b) + " ms"});
    return t.str();
}

} // namespace rmdf
