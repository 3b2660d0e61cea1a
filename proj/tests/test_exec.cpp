#include "doctest.h"

#include <algorithm>

#include "rmdf/analysis.hpp"
#include "rmdf/examples.hpp"
#include "rmdf/exec.hpp"
#include "rmdf/io.hpp"
#include "generators.hpp"

using namespace rmdf;

namespace {

// tokens consumed by `actor` from `channel`, in order
std::vector<std::pair<std::string, std::int64_t>> consumed_from(const Trace& trace,
                                                                const std::string& actor,
                                                                const std::string& channel) {
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (const auto& ev : trace)
        if (ev.consumed && ev.actor == actor && ev.channel == channel)
            out.emplace_back(ev.token.origin, ev.token.index);
    return out;
}

std::map<std::string, std::int64_t> targets_for(const Spec& spec, std::int64_t hyperperiods) {
    auto verdict = consistency(with_all_params_one(spec));
    REQUIRE(verdict.consistent);
    std::map<std::string, std::int64_t> t;
    for (const auto& [actor, q] : verdict.repetition.counts) t[actor] = q * hyperperiods;
    return t;
}

// controlled splitter driven by an explicit decision stream
Spec controlled_splitter_rig() {
    return parse_spec(R"({
      "name": "controlled splitter rig",
      "actors": [
        {"id": "SRC"}, {"id": "TRG"}, {"id": "MD", "kind": "mode_decider"},
        {"id": "CS", "kind": "controlled_splitter"}, {"id": "X"}, {"id": "Y"} ],
      "channels": [
        {"id": "trg_md", "from": ["TRG", 0], "to": ["MD", 0], "prod": "1", "cons": "1"},
        {"id": "md_cs", "from": ["MD", 0], "to": ["CS", 1], "prod": "1", "cons": "1", "control": true},
        {"id": "src_cs", "from": ["SRC", 0], "to": ["CS", 0], "prod": "1", "cons": "1"},
        {"id": "out1", "from": ["CS", 0], "to": ["X", 0], "prod": {"param": "m1"}, "cons": "1"},
        {"id": "out2", "from": ["CS", 1], "to": ["Y", 0], "prod": {"param": "m2"}, "cons": "1"} ],
      "modes": [ {"m1": 1, "m2": 0}, {"m1": 0, "m2": 1} ]
    })");
}

} // namespace

TEST_CASE("[exec] controlled splitter routes per control token") {
    Spec s = controlled_splitter_rig();
    ModeAssignment m1{{"m1", 1}, {"m2", 0}}, m2{{"m1", 0}, {"m2", 1}};
    ExecOptions opts;
    opts.policy = mode_sequence_policy({m1, m1, m1, m2});
    std::map<std::string, std::int64_t> targets{{"SRC", 4}, {"TRG", 4}, {"MD", 4},
                                                {"CS", 4},  {"X", 3},   {"Y", 1}};
    RunResult run = run_to_completion(s, targets, std::move(opts));
    REQUIRE(run.completed);
    CHECK(consumed_from(run.trace, "X", "out1") ==
          std::vector<std::pair<std::string, std::int64_t>>{{"SRC", 1}, {"SRC", 2}, {"SRC", 3}});
    CHECK(consumed_from(run.trace, "Y", "out2") ==
          std::vector<std::pair<std::string, std::int64_t>>{{"SRC", 4}});
}

TEST_CASE("[exec] plain splitter follows the cyclic port order") {
    Spec s = example_spec("fig5a_routed");
    RunResult run = run_to_completion(s, targets_for(s, 2));
    REQUIRE(run.completed);
    // input 1..6: the 2/3 port sees 1,2,4,5 and the 1/3 port sees 3,6
    CHECK(consumed_from(run.trace, "B", "c1") ==
          std::vector<std::pair<std::string, std::int64_t>>{{"A", 1}, {"A", 2}, {"A", 4}, {"A", 5}});
    CHECK(consumed_from(run.trace, "C", "c2") ==
          std::vector<std::pair<std::string, std::int64_t>>{{"A", 3}, {"A", 6}});
}

TEST_CASE("[exec] splitter/joiner port counts over one cycle equal the rate numerators") {
    Spec s = example_spec("fig5a_routed");
    RunResult run = run_to_completion(s, targets_for(s, 1));
    REQUIRE(run.completed);
    CHECK(consumed_from(run.trace, "B", "c1").size() == 2);
    CHECK(consumed_from(run.trace, "C", "c2").size() == 1);

    Spec j = example_spec("fig5b_routed");
    RunResult jr = run_to_completion(j, targets_for(j, 1));
    REQUIRE(jr.completed);
    CHECK(consumed_from(jr.trace, "JOIN", "c1").size() == 2);
    CHECK(consumed_from(jr.trace, "JOIN", "c2").size() == 1);
}

TEST_CASE("[exec] duplicater copies to every output") {
    Spec s = example_spec("fig5c_routed");
    RunResult run = run_to_completion(s, targets_for(s, 3));
    REQUIRE(run.completed);
    auto b = consumed_from(run.trace, "B", "c1");
    auto c = consumed_from(run.trace, "C", "c2");
    CHECK(b == c);
    CHECK(b == std::vector<std::pair<std::string, std::int64_t>>{{"A", 1}, {"A", 2}, {"A", 3}});
}

TEST_CASE("[exec] ineligible step is a caller error") {
    Spec s = example_spec("fig5a_plain");
    Executor ex(s);
    CHECK_FALSE(ex.eligible("B"));
    CHECK_THROWS_AS(ex.step("B"), exec_error);
}

TEST_CASE("[exec] token balance per channel") {
    Spec s = example_spec("fig11a");
    RunResult run = run_to_completion(s, targets_for(s, 2));
    REQUIRE(run.completed);
    std::map<std::string, std::int64_t> produced, consumed;
    for (const auto& ev : run.trace) (ev.consumed ? consumed : produced)[ev.channel]++;
    for (const auto& c : s.channels) {
        std::int64_t seed = c.initial_tokens.floor();
        std::int64_t final_len =
            static_cast<std::int64_t>(run.final_state.queues.at(c.id).size());
        CHECK(seed + produced[c.id] - consumed[c.id] == final_len);
        CHECK(final_len >= 0);
        CHECK(final_len == seed);  // one hyperperiod restores the state
    }
}

TEST_CASE("[exec] confluence: final state independent of sweep order") {
    Spec s = substitute_mode(example_spec("fig11c"), ModeAssignment{{"m1", 0}, {"m2", 1}});
    auto targets = targets_for(s, 1);
    ModeAssignment m2{{"m1", 0}, {"m2", 1}};
    std::vector<std::string> ids;
    for (const auto& a : s.actors) ids.push_back(a.id);

    std::map<std::string, std::int64_t> reference;
    testgen::Rng rng(5);
    for (int round = 0; round < 5; ++round) {
        ExecOptions opts;
        opts.policy = [m2](const std::string&, std::int64_t) { return m2; };
        opts.sweep_order = ids;
        std::shuffle(opts.sweep_order.begin(), opts.sweep_order.end(), rng);
        RunResult run = run_to_completion(s, targets, std::move(opts));
        REQUIRE(run.completed);
        auto sig = state_signature(run.final_state);
        if (round == 0)
            reference = sig;
        else
            CHECK(sig == reference);
    }
}

TEST_CASE("[preprocess] sufficient initial tokens execute offline") {
    Spec s = parse_spec(R"({
      "name": "chain",
      "actors": [ {"id": "A", "frequency_hz": "10"}, {"id": "B"} ],
      "channels": [ {"id": "ab", "from": ["A",0], "to": ["B",0], "prod": "1", "cons": "1", "init": "1"} ]
    })");
    PreprocessResult res = preprocess(s, nullptr, 100);
    CHECK(res.offline_jobs == std::map<std::string, std::int64_t>{{"B", 1}});
    CHECK(res.total_offline == 1);
    CHECK(res.spec.find_channel("ab")->initial_tokens == Rational(0));
}

TEST_CASE("[preprocess] nothing eligible, nothing changes") {
    Spec s = parse_spec(R"({
      "name": "dry chain",
      "actors": [ {"id": "A", "frequency_hz": "10"}, {"id": "B"}, {"id": "C"} ],
      "channels": [
        {"id": "ab", "from": ["A",0], "to": ["B",0], "prod": "1", "cons": "1"},
        {"id": "bc", "from": ["B",0], "to": ["C",0], "prod": "1", "cons": "1"} ]
    })");
    PreprocessResult res = preprocess(s, nullptr, 100);
    CHECK(res.offline_jobs.empty());
    CHECK(structurally_equal(res.spec, s));
}

TEST_CASE("[preprocess] ingenuity executes no offline job") {
    // the tracker's self-loop token is not enough (it also needs splitter
    // input) and 1/50 initial credit is less than one whole token
    Spec s = example_spec("fig11c");
    PreprocessResult res = preprocess(s);
    CHECK(res.offline_jobs.empty());
    CHECK(structurally_equal(res.spec, s));
}

TEST_CASE("[preprocess] offline decider without a policy is an error") {
    Spec s = parse_spec(R"({
      "name": "offline decider",
      "actors": [
        {"id": "SRC", "frequency_hz": "10"}, {"id": "MD", "kind": "mode_decider"},
        {"id": "CS", "kind": "controlled_splitter"}, {"id": "X"}, {"id": "Y"} ],
      "channels": [
        {"id": "src_md", "from": ["SRC",0], "to": ["MD",0], "prod": "1", "cons": "1", "init": "1"},
        {"id": "md_cs", "from": ["MD",0], "to": ["CS",1], "prod": "1", "cons": "1", "control": true},
        {"id": "src_cs", "from": ["SRC",1], "to": ["CS",0], "prod": "1", "cons": "1", "init": "1"},
        {"id": "o1", "from": ["CS",0], "to": ["X",0], "prod": {"param":"m1"}, "cons": "1"},
        {"id": "o2", "from": ["CS",1], "to": ["Y",0], "prod": {"param":"m2"}, "cons": "1"} ],
      "modes": [ {"m1":1,"m2":0}, {"m1":0,"m2":1} ]
    })");
    CHECK_THROWS_AS(preprocess(s, nullptr, 100), exec_error);

    PreprocessResult res = preprocess(s, fixed_port_policy(s, 0), 100);
    CHECK(res.offline_jobs.at("MD") == 1);
    CHECK(res.offline_jobs.at("CS") == 1);
    CHECK(res.offline_jobs.at("X") == 1);
    CHECK(res.offline_jobs.count("Y") == 0);
}

TEST_CASE("[preprocess] diverging offline loop trips the budget") {
    Spec s = parse_spec(R"({
      "name": "spinner",
      "actors": [ {"id": "A"}, {"id": "B"} ],
      "channels": [
        {"id": "ab", "from": ["A",0], "to": ["B",0], "prod": "1", "cons": "1", "init": "1"},
        {"id": "ba", "from": ["B",0], "to": ["A",0], "prod": "1", "cons": "1", "init": "1"} ]
    })");
    CHECK_THROWS_AS(preprocess(s, nullptr, 50), exec_error);
}

TEST_CASE("[run] consistent two-actor chain restores its state") {
    Spec s = parse_spec(R"({
      "name": "chain2",
      "actors": [ {"id": "A"}, {"id": "B"} ],
      "channels": [ {"id": "ab", "from": ["A",0], "to": ["B",0], "prod": "1", "cons": "1"} ]
    })");
    RunResult run = run_to_completion(s, {{"A", 1}, {"B", 1}});
    REQUIRE(run.completed);
    CHECK(state_signature(run.final_state) == state_signature(initial_state(s)));
}

TEST_CASE("[run] zero-token cycle deadlocks with a stuck-state report") {
    Spec s = parse_spec(R"({
      "name": "deadlock",
      "actors": [ {"id": "A"}, {"id": "B"} ],
      "channels": [
        {"id": "ab", "from": ["A",0], "to": ["B",0], "prod": "1", "cons": "1"},
        {"id": "ba", "from": ["B",0], "to": ["A",0], "prod": "1", "cons": "1"} ]
    })");
    RunResult run = run_to_completion(s, {{"A", 1}, {"B", 1}});
    CHECK_FALSE(run.completed);
    CHECK(run.diagnosis.find("deadlock") != std::string::npos);
    CHECK(run.diagnosis.find("A=0/1") != std::string::npos);
}

TEST_CASE("[run] exhausted mode sequence is an error") {
    Spec s = example_spec("fig8");
    ExecOptions opts;
    opts.policy = mode_sequence_policy({s.mode_table.modes[0]});
    std::map<std::string, std::int64_t> targets{{"B", 2}, {"A", 2}, {"Dup1", 2}};
    CHECK_THROWS_AS(run_to_completion(s, targets, std::move(opts)), exec_error);
}

TEST_CASE("[mcp] the running example satisfies all three properties") {
    Spec s = example_spec("fig8");
    auto areas = compute_control_areas(s);
    const auto& rows = s.mode_table.modes;
    Trace t1 = run_modal(s, {rows[0], rows[1], rows[2], rows[1]}).trace;
    Trace t2 = run_modal(s, {rows[2], rows[0], rows[1], rows[0]}).trace;
    McpReport report = check_mcp_properties(s, {t1, t2}, areas);
    CHECK(report.non_overlapping);
    CHECK(report.periodic);
    CHECK(report.late_retirement);
    CHECK(report.all_hold());
}

TEST_CASE("[mcp] multi-firing hyperperiods expand the mode sequence") {
    // the label decider fires three times per 100 ms hyperperiod, and one
    // sequence entry covers all of them
    Spec s = example_spec("fig11c");
    auto areas = compute_control_areas(s);
    const auto& rows = s.mode_table.modes;
    RunResult run = run_modal(s, {rows[0], rows[1]});
    REQUIRE(run.completed);
    CHECK(run.final_state.job_counters.at("LabelDecider") == 6);
    CHECK(run.final_state.job_counters.at("Motors") == 100);
    CHECK(run.final_state.job_counters.at("PseudoLandmarks") == 3);
    CHECK(run.final_state.job_counters.at("FeatureTracking") == 3);
    McpReport report = check_mcp_properties(s, {run.trace}, areas);
    CHECK(report.all_hold());
}

TEST_CASE("[mcp] single-decision trace passes vacuously") {
    Spec s = example_spec("fig8");
    auto areas = compute_control_areas(s);
    Trace t = run_modal(s, {s.mode_table.modes[0]}).trace;
    CHECK(check_mcp_properties(s, {t}, areas).all_hold());
}

TEST_CASE("[mcp] hand-built overlapping trace is rejected") {
    Spec s = example_spec("fig8");
    auto areas = compute_control_areas(s);
    Token ctrl{Token::Kind::Control, "B", 1, {{"m1", 1}, {"m2", 0}, {"m3", 0}}};
    Token data{Token::Kind::Data, "A", 1, {}};
    Trace fake{
        {0, "CS", 1, "dup2_cs", ctrl, true},
        {1, "CS", 1, "cs_c1", data, false},
        {2, "CS", 2, "cs_d1", data, false},  // second branch without a new control token
    };
    McpReport report = check_mcp_properties(s, {fake}, areas);
    CHECK_FALSE(report.non_overlapping);
}

TEST_CASE("[mcp] eager joiner breaks late retirement") {
    Spec s = example_spec("fig8");
    auto areas = compute_control_areas(s);
    const auto& rows = s.mode_table.modes;
    // visit the joiner right after the short branch so the mutant sees the
    // new branch's token while the long branch is still computing
    std::vector<std::string> order{"A", "B", "CS", "D1", "CJ", "E1", "F", "Dup1", "Dup2", "C2", "C1"};

    ExecOptions honest;
    honest.sweep_order = order;
    Trace good = run_modal(s, {rows[0], rows[1]}, honest).trace;
    CHECK(check_mcp_properties(s, {good}, areas).late_retirement);

    ExecOptions mutated;
    mutated.sweep_order = order;
    mutated.eager_controlled_joiners = true;
    Trace bad = run_modal(s, {rows[0], rows[1]}, mutated).trace;
    McpReport report = check_mcp_properties(s, {bad}, areas);
    CHECK_FALSE(report.late_retirement);
    CHECK(report.non_overlapping);  // the splitter still routes correctly
}
