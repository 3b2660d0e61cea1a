#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "rmdf/analysis.hpp"
#include "rmdf/desugar.hpp"
#include "rmdf/examples.hpp"
#include "rmdf/exec.hpp"
#include "rmdf/io.hpp"
#include "rmdf/rate.hpp"
#include "rmdf/report.hpp"
#include "rmdf/timing.hpp"

namespace {

using namespace rmdf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdict = 2;
constexpr int kExitInternal = 3;

// verdict styling on terminals; RMDF_COLOR=0 disables it, and piped output
// is always plain so identical runs stay byte-identical
bool color_enabled() {
    const char* env = std::getenv("RMDF_COLOR");
    if (env && std::string(env) == "0") return false;
    return isatty(fileno(stdout));
}

void print_report(const std::string& text, bool positive) {
    if (!color_enabled()) {
        std::cout << text;
        return;
    }
    const char* tint = positive ? "\033[32m" : "\033[31m";
    std::size_t line_end = text.find('\n');
    std::size_t verdict = text.rfind("verdict:");
    std::size_t mark = verdict != std::string::npos ? verdict : 0;
    std::cout << text.substr(0, mark) << tint
              << text.substr(mark, line_end == std::string::npos ? std::string::npos
                                                                 : text.find('\n', mark) - mark)
              << "\033[0m";
    std::size_t rest = text.find('\n', mark);
    if (rest != std::string::npos) std::cout << text.substr(rest);
}

DeciderPolicy parse_policy(const Spec& spec, const std::string& text) {
    if (text.empty()) return nullptr;
    if (text.rfind("port:", 0) != 0)
        throw CLI::ValidationError("--policy", "expected port:<index>");
    int port = std::stoi(text.substr(5));
    return fixed_port_policy(spec, port);
}

std::vector<ModeAssignment> parse_mode_list(const Spec& spec, const std::string& text) {
    std::vector<ModeAssignment> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        std::size_t idx = std::stoul(item);
        if (idx < 1 || idx > spec.mode_table.modes.size())
            throw CLI::ValidationError("--modes", "mode index " + item + " out of range");
        out.push_back(spec.mode_table.modes[idx - 1]);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int cmd_check(const std::string& path, const std::string& format) {
    Spec spec = load_spec_file(path);
    auto violations = validate_structure(spec);
    if (violations.empty()) {
        auto coherence = check_mode_coherence(spec);
        violations.insert(violations.end(), coherence.begin(), coherence.end());
    }
    print_report(render_violations(violations, report_format_from_name(format)),
                 violations.empty());
    return violations.empty() ? kExitOk : kExitVerdict;
}

int cmd_desugar(const std::string& path, const std::string& out_path) {
    Spec spec = load_spec_file(path);
    std::vector<std::string> warnings;
    Spec plain = remove_routing_actors(spec, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (out_path.empty())
        std::cout << serialize_spec(plain);
    else
        write_spec_file(plain, out_path);
    return kExitOk;
}

int cmd_analyze(const std::string& path, const std::string& format) {
    Spec spec = load_spec_file(path);
    AnalysisReport report = analyze_rmdf(spec);
    print_report(render_analysis(report, report_format_from_name(format)), report.ok());
    return report.ok() ? kExitOk : kExitVerdict;
}

int cmd_preprocess(const std::string& path, const std::string& out_path,
                   const std::string& policy, std::int64_t budget) {
    Spec spec = load_spec_file(path);
    PreprocessResult res = preprocess(spec, parse_policy(spec, policy), budget);
    if (res.offline_jobs.empty()) {
        std::cerr << "no offline job executes\n";
    } else {
        std::cerr << "offline jobs:";
        for (const auto& [actor, n] : res.offline_jobs) std::cerr << " " << actor << "=" << n;
        std::cerr << "\n";
    }
    if (out_path.empty())
        std::cout << serialize_spec(res.spec);
    else
        write_spec_file(res.spec, out_path);
    return kExitOk;
}

int cmd_simulate(const std::string& path, std::int64_t hyperperiods, const std::string& modes,
                 const std::string& trace_path) {
    Spec spec = load_spec_file(path);
    RunResult run;
    if (!modes.empty()) {
        run = run_modal(spec, parse_mode_list(spec, modes));
    } else {
        Spec ones = with_all_params_one(spec);
        auto verdict = consistency(ones);
        if (!verdict.consistent) {
            std::cerr << "inconsistent: " << verdict.witness << "\n";
            return kExitVerdict;
        }
        std::map<std::string, std::int64_t> targets;
        for (const auto& [actor, n] : verdict.repetition.counts) targets[actor] = n * hyperperiods;
        run = run_to_completion(spec, targets);
    }
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        for (const auto& ev : run.trace) {
            nlohmann::ordered_json j;
            j["step"] = ev.step;
            j["actor"] = ev.actor;
            j["job"] = ev.job;
            j["channel"] = ev.channel;
            j["kind"] = ev.token.kind == Token::Kind::Control ? "control" : "data";
            j["origin"] = ev.token.origin;
            j["index"] = ev.token.index;
            j["moved"] = ev.consumed ? "consumed" : "produced";
            out << j.dump() << "\n";
        }
    }
    std::cout << (run.completed ? "completed" : "deadlock") << ": " << run.trace.size()
              << " token movements\n";
    if (!run.completed) {
        std::cout << run.diagnosis << "\n";
        return kExitVerdict;
    }
    return kExitOk;
}

// The design-flow gate for the timing commands: the spec must be
// structurally valid, mode-coherent, and consistent and live in every mode
// before windows mean anything.
bool timing_preconditions(const Spec& spec, AnalysisReport& report) {
    report = analyze_rmdf(spec);
    return report.ok();
}

int cmd_timing(const std::string& path, const std::string& actor, std::int64_t job,
               std::int64_t hyperperiods, const std::string& format) {
    Spec spec = load_spec_file(path);
    AnalysisReport gate;
    if (!timing_preconditions(spec, gate)) {
        std::cerr << render_analysis(gate, ReportFormat::Table);
        return kExitVerdict;
    }
    PreprocessResult pre = preprocess(spec);
    TimingEngine engine(spec, pre.offline_jobs);
    if (!actor.empty()) {
        std::int64_t n = job > 0 ? job : 1;
        Rational rel = engine.release(actor, n);
        TimeBound dl = engine.deadline(actor, n);
        WindowTable single;
        single.hyperperiod_ms = engine.hyperperiod_ms();
        single.repetition = engine.repetition().counts;
        single.windows.push_back({actor, n, rel, dl});
        std::cout << render_windows(single, report_format_from_name(format));
        return kExitOk;
    }
    WindowTable table = engine.window_table();
    if (hyperperiods > 1) {
        WindowTable extended = table;
        for (std::int64_t k = 1; k < hyperperiods; ++k)
            for (const auto& w : table.windows) {
                std::int64_t q = table.repetition.at(w.actor);
                extended.windows.push_back(
                    {w.actor, w.job + k * q, engine.release(w.actor, w.job + k * q),
                     engine.deadline(w.actor, w.job + k * q)});
            }
        std::sort(extended.windows.begin(), extended.windows.end(),
                  [](const ExecutionWindow& a, const ExecutionWindow& b) {
                      return a.actor < b.actor || (a.actor == b.actor && a.job < b.job);
                  });
        table = std::move(extended);
    }
    std::cout << render_windows(table, report_format_from_name(format));
    return kExitOk;
}

int cmd_feasibility(const std::string& path, bool bounds, const std::string& format) {
    Spec spec = load_spec_file(path);
    AnalysisReport gate;
    if (!timing_preconditions(spec, gate)) {
        std::cerr << render_analysis(gate, ReportFormat::Table);
        return kExitVerdict;
    }
    PreprocessResult pre = preprocess(spec);
    TimingEngine engine(spec, pre.offline_jobs);
    auto fmt = report_format_from_name(format);
    if (bounds) {
        std::cout << render_max_wcet(engine.max_feasible_wcet(), fmt);
        return kExitOk;
    }
    FeasibilityResult res = engine.feasibility();
    print_report(render_feasibility(res, fmt), res.feasible);
    return res.feasible ? kExitOk : kExitVerdict;
}

int cmd_rate(const std::string& seq_text, const std::string& direction) {
    TokenSequence seq;
    std::size_t pos = 0;
    while (pos <= seq_text.size()) {
        std::size_t comma = seq_text.find(',', pos);
        seq.push_back(std::stoll(seq_text.substr(pos, comma == std::string::npos ? comma : comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    auto result = direction == "cons" ? rate_init_from_consumption_sequence(seq)
                                      : rate_init_from_production_sequence(seq);
    if (!result) {
        std::cout << "not generable by a single rational rate\n";
        return kExitVerdict;
    }
    std::cout << "rate: " << result->rate.str() << "\ninitial tokens: " << result->initial_tokens.str()
              << "\n";
    return kExitOk;
}

int cmd_examples(const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, spec] : bundled_examples())
        write_spec_file(spec, (std::filesystem::path(dir) / (name + ".json")).string());
    std::cout << "wrote " << bundled_examples().size() << " specs to " << dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rmdf - static analysis of mode-dependent real-time dataflow specifications"};
    app.require_subcommand(1);

    std::string path, out_path, format = "table", actor, policy, modes, trace_path, seq, direction = "prod", dir;
    std::int64_t job = 0, hyperperiods = 1, budget = 0;
    bool bounds = false;

    auto* check = app.add_subcommand("check", "structural validation and mode coherence");
    check->add_option("spec", path)->required();
    check->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    auto* desugar = app.add_subcommand("desugar", "remove plain routing actors");
    desugar->add_option("spec", path)->required();
    desugar->add_option("-o,--output", out_path);

    auto* analyze = app.add_subcommand("analyze", "consistency and liveness of every mode");
    analyze->add_option("spec", path)->required();
    analyze->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    auto* preprocess_cmd = app.add_subcommand("preprocess", "execute offline jobs");
    preprocess_cmd->add_option("spec", path)->required();
    preprocess_cmd->add_option("-o,--output", out_path);
    preprocess_cmd->add_option("--policy", policy, "offline mode decisions, e.g. port:0");
    preprocess_cmd->add_option("--budget", budget, "offline step budget (0 = derive)");

    auto* simulate = app.add_subcommand("simulate", "symbolic token-level execution");
    simulate->add_option("spec", path)->required();
    simulate->add_option("--hyperperiods", hyperperiods);
    simulate->add_option("--modes", modes, "1-based mode rows, e.g. 1,2,1");
    simulate->add_option("--trace", trace_path, "write one token movement per line (jsonl)");

    auto* timing = app.add_subcommand("timing", "per-job release/deadline windows");
    timing->add_option("spec", path)->required();
    timing->add_option("--actor", actor);
    timing->add_option("--job", job);
    timing->add_option("--hyperperiods", hyperperiods);
    timing->add_option("--format", format)->check(CLI::IsMember({"table", "json", "csv"}));

    auto* feasibility = app.add_subcommand("feasibility", "necessary feasibility condition");
    feasibility->add_option("spec", path)->required();
    feasibility->add_flag("--bounds", bounds, "print per-actor maximum feasible WCETs");
    feasibility->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    auto* rate = app.add_subcommand("rate", "rate/initial-tokens from a one-period sequence");
    rate->add_option("--seq", seq, "comma-separated token counts, e.g. 1,1,0")->required();
    rate->add_option("--direction", direction)->check(CLI::IsMember({"prod", "cons"}));

    auto* examples = app.add_subcommand("examples", "write the bundled example specs");
    examples->add_option("dir", dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : kExitOk;
    }

    try {
        if (check->parsed()) return cmd_check(path, format);
        if (desugar->parsed()) return cmd_desugar(path, out_path);
        if (analyze->parsed()) return cmd_analyze(path, format);
        if (preprocess_cmd->parsed()) return cmd_preprocess(path, out_path, policy, budget);
        if (simulate->parsed()) return cmd_simulate(path, hyperperiods, modes, trace_path);
        if (timing->parsed()) return cmd_timing(path, actor, job, hyperperiods, format);
        if (feasibility->parsed()) return cmd_feasibility(path, bounds, format);
        if (rate->parsed()) return cmd_rate(seq, direction);
        if (examples->parsed()) return cmd_examples(dir);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
