#include "doctest.h"

#include "rmdf/analysis.hpp"
#include "rmdf/desugar.hpp"
#include "rmdf/examples.hpp"
#include "rmdf/io.hpp"
#include "generators.hpp"

using namespace rmdf;

namespace {

Rational entry(const TopologyMatrix& m, const std::string& channel, const std::string& actor) {
    for (std::size_t i = 0; i < m.channel_ids.size(); ++i)
        if (m.channel_ids[i] == channel)
            for (std::size_t j = 0; j < m.actor_ids.size(); ++j)
                if (m.actor_ids[j] == actor) return m.entries[i][j];
    FAIL("missing entry");
    return Rational(0);
}

} // namespace

TEST_CASE("[matrix] signed rates by definition") {
    Spec s = parse_spec(R"({
      "name": "simple",
      "actors": [ {"id":"A"}, {"id":"B"} ],
      "channels": [ {"id":"c","from":["A",0],"to":["B",0],"prod":"2/3","cons":"1"} ]
    })");
    auto m = build_topology_matrix(s);
    CHECK(entry(m, "c", "A") == Rational(2, 3));
    CHECK(entry(m, "c", "B") == Rational(-1));
}

TEST_CASE("[matrix] routed splitter column") {
    auto m = build_topology_matrix(example_spec("fig5a_routed"));
    CHECK(entry(m, "a_spl", "SPL") == Rational(-1));
    CHECK(entry(m, "c1", "SPL") == Rational(2, 3));
    CHECK(entry(m, "c2", "SPL") == Rational(1, 3));
}

TEST_CASE("[matrix] self-loop nets to zero") {
    auto m = build_topology_matrix(example_spec("fig11a"));
    CHECK(entry(m, "ft_ft", "FeatureTracking") == Rational(0));
}

TEST_CASE("[matrix] parametric rates are rejected") {
    CHECK_THROWS_AS(build_topology_matrix(example_spec("fig8")), analysis_error);
}

TEST_CASE("[consistency] ingenuity repetition vector and hyperperiod") {
    // all-parameters-1 reading of the modified spec
    Spec ones = with_all_params_one(example_spec("fig11c"));
    auto verdict = consistency(ones);
    REQUIRE(verdict.consistent);
    for (const auto& [actor, q] : verdict.repetition.counts)
        CHECK(q == (actor == "Motors" ? 50 : 3));
    REQUIRE(verdict.repetition.hyperperiod_ms.has_value());
    CHECK(*verdict.repetition.hyperperiod_ms == Rational(100));

    // both substituted modes agree
    for (const auto& mode : example_spec("fig11c").mode_table.modes) {
        Spec sub = substitute_mode(example_spec("fig11c"), mode);
        auto v = consistency(sub);
        REQUIRE(v.consistent);
        CHECK(*v.repetition.hyperperiod_ms == Rational(100));
        for (const auto& [actor, q] : v.repetition.counts)
            CHECK(q == (actor == "Motors" ? 50 : 3));
    }
}

TEST_CASE("[consistency] rate loop forcing q = 2q is inconsistent") {
    Spec s = parse_spec(R"({
      "name": "loop",
      "actors": [ {"id":"A"}, {"id":"B"} ],
      "channels": [
        {"id":"ab","from":["A",0],"to":["B",0],"prod":"2","cons":"1"},
        {"id":"ba","from":["B",0],"to":["A",0],"prod":"1","cons":"1"} ]
    })");
    auto verdict = consistency(s);
    CHECK_FALSE(verdict.consistent);
    CHECK_FALSE(verdict.witness.empty());
}

TEST_CASE("[consistency] frequency-compatible chain") {
    Spec s = parse_spec(R"({
      "name": "chain",
      "actors": [ {"id":"A","frequency_hz":"10"}, {"id":"B","frequency_hz":"30"} ],
      "channels": [ {"id":"ab","from":["A",0],"to":["B",0],"prod":"1","cons":"1/3"} ]
    })");
    auto verdict = consistency(s);
    REQUIRE(verdict.consistent);
    CHECK(verdict.repetition.counts.at("A") == 1);
    CHECK(verdict.repetition.counts.at("B") == 3);
    CHECK(*verdict.repetition.hyperperiod_ms == Rational(100));
}

TEST_CASE("[consistency] clashing hyperperiods name the witness pair") {
    Spec s = parse_spec(R"({
      "name": "clash",
      "actors": [ {"id":"A","frequency_hz":"10"}, {"id":"B","frequency_hz":"20"} ],
      "channels": [ {"id":"ab","from":["A",0],"to":["B",0],"prod":"1","cons":"1"} ]
    })");
    auto verdict = consistency(s);
    CHECK_FALSE(verdict.consistent);
    CHECK(verdict.witness.find("hyperperiod") != std::string::npos);
}

TEST_CASE("[consistency] inconsistent self-loop") {
    Spec s = parse_spec(R"({
      "name": "selfloop",
      "actors": [ {"id":"A"} ],
      "channels": [ {"id":"aa","from":["A",0],"to":["A",0],"prod":"2","cons":"1","init":"1"} ]
    })");
    CHECK_FALSE(consistency(s).consistent);
}

TEST_CASE("[consistency] disconnected specs are an error") {
    Spec s = parse_spec(R"({
      "name": "islands",
      "actors": [ {"id":"A"}, {"id":"B"} ],
      "channels": [] })");
    CHECK_THROWS_AS(consistency(s), analysis_error);
}

TEST_CASE("[consistency] scale invariance and minimality") {
    testgen::Rng rng(11);
    auto flows_integral = [](const Spec& s, const std::map<std::string, std::int64_t>& counts,
                             std::int64_t divisor) {
        for (const auto& c : s.channels) {
            Rational flow = Rational(counts.at(c.producer.actor), divisor) * c.production_rate.value;
            if (!flow.is_integer()) return false;
        }
        return true;
    };
    for (int i = 0; i < 20; ++i) {
        Spec s = testgen::random_timed_dag(rng);
        auto base = consistency(s);
        REQUIRE(base.consistent);

        // the hyperperiod returns the token state, so q is the smallest
        // vector with integral per-period channel flows: any common divisor
        // above 1 must break that integrality
        std::int64_t g = 0;
        for (const auto& [actor, q] : base.repetition.counts) g = gcd64(g, q);
        CHECK(flows_integral(s, base.repetition.counts, 1));
        if (g > 1) {
            bool some_prime_divides_all = false;
            for (std::int64_t p = 2; p <= g; ++p) {
                if (g % p != 0) continue;
                some_prime_divides_all = true;
                CHECK_FALSE(flows_integral(s, base.repetition.counts, p));
            }
            CHECK(some_prime_divides_all);
        }

        // integer-scaling both rates of one channel leaves the counts of a
        // flow-integral spec unchanged
        if (g != 1) continue;
        Spec scaled = s;
        auto& c = scaled.channels[static_cast<std::size_t>(
            testgen::pick(rng, 0, static_cast<std::int64_t>(scaled.channels.size()) - 1))];
        Rational k(testgen::pick(rng, 2, 4));
        c.production_rate = RateExpr::constant(c.production_rate.value * k);
        c.consumption_rate = RateExpr::constant(c.consumption_rate.value * k);
        auto verdict = consistency(scaled);
        REQUIRE(verdict.consistent);
        CHECK(verdict.repetition.counts == base.repetition.counts);
    }
}

TEST_CASE("[consistency] commutes with routing-actor removal") {
    testgen::Rng rng(13);
    for (int i = 0; i < 25; ++i) {
        Spec routed = testgen::random_routed_spec(rng);
        Spec plain = remove_routing_actors(routed);
        auto a = consistency(routed);
        auto b = consistency(plain);
        REQUIRE(a.consistent);
        REQUIRE(b.consistent);
        for (const auto& [actor, q] : b.repetition.counts) {
            const Actor* act = routed.find_actor(actor);
            if (act && !is_routing(act->kind)) CHECK(a.repetition.counts.at(actor) == q);
        }
    }
}

TEST_CASE("[liveness] live specs restore their initial state") {
    Spec s = remove_routing_actors(example_spec("fig5a_routed"));
    auto verdict = consistency(s);
    REQUIRE(verdict.consistent);
    auto lv = liveness(s, verdict.repetition);
    CHECK(lv.live);
    CHECK(lv.state_restored);
}

TEST_CASE("[liveness] zero-token cycle deadlocks") {
    Spec s = parse_spec(R"({
      "name": "cycle",
      "actors": [ {"id":"A"}, {"id":"B"} ],
      "channels": [
        {"id":"ab","from":["A",0],"to":["B",0],"prod":"1","cons":"1"},
        {"id":"ba","from":["B",0],"to":["A",0],"prod":"1","cons":"1"} ]
    })");
    RepetitionVector rv;
    rv.counts = {{"A", 1}, {"B", 1}};
    auto lv = liveness(s, rv);
    CHECK_FALSE(lv.live);
    CHECK(lv.deadlock.find("deadlock") != std::string::npos);
}

TEST_CASE("[analyze] ingenuity family is consistent and live in every mode") {
    for (const char* name : {"fig11a", "fig11b", "fig11c"}) {
        CAPTURE(name);
        AnalysisReport report = analyze_rmdf(example_spec(name));
        CHECK(report.ok());
    }
}

TEST_CASE("[analyze] three-branch example has three live modes") {
    AnalysisReport report = analyze_rmdf(example_spec("fig8"));
    CHECK(report.ok());
    CHECK(report.modes.size() == 3);
}

TEST_CASE("[analyze] incoherent specs stop before mode analysis") {
    AnalysisReport report = analyze_rmdf(example_spec("fig9e"));
    CHECK_FALSE(report.ok());
    CHECK(report.structural.empty());
    REQUIRE_FALSE(report.mode_coherence.empty());
    CHECK(report.mode_coherence.front().rule == "R5");
    CHECK(report.modes.empty());
}

TEST_CASE("[analyze] parameter-free spec degenerates to one plain analysis") {
    AnalysisReport report = analyze_rmdf(example_spec("fig5b_routed"));
    CHECK(report.ok());
    CHECK(report.modes.size() == 1);
    CHECK(report.modes[0].mode.empty());
}

TEST_CASE("[analyze] injected zero-token cycle is reported as deadlock") {
    Spec s = example_spec("fig11c");
    for (auto& c : s.channels)
        if (c.id == "ft_ft") c.initial_tokens = Rational(0);
    AnalysisReport report = analyze_rmdf(s);
    CHECK_FALSE(report.ok());
    bool tracking_mode_deadlocks = false;
    for (const auto& m : report.modes)
        if (m.consistent && !m.live && m.mode.at("m2") == 1) tracking_mode_deadlocks = true;
    CHECK(tracking_mode_deadlocks);
}
