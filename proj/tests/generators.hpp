#ifndef RMDF_TEST_GENERATORS_HPP
#define RMDF_TEST_GENERATORS_HPP

// Shared test-only helpers: random specification builders and an
// independent brute-force timing oracle. Nothing here may call into the
// closed-form timing path it is used to check.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rmdf/analysis.hpp"
#include "rmdf/model.hpp"

namespace rmdf::testgen {

using Rng = std::mt19937;

inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Channel make_channel(std::string id, std::string from, int fp, std::string to, int tp,
                            Rational prod, Rational cons, Rational init = Rational(0)) {
    Channel c;
    c.id = std::move(id);
    c.producer = {std::move(from), fp};
    c.consumer = {std::move(to), tp};
    c.production_rate = RateExpr::constant(prod);
    c.consumption_rate = RateExpr::constant(cons);
    c.initial_tokens = init;
    return c;
}

// A random routed spec: a source feeding a splitter whose branches (possibly
// through a duplicater, possibly into a discard) merge back through a joiner
// with shuffled port order. Far sides of every routing actor carry rate 1,
// which is the class the removal transformation supports. `compact` caps the
// size at 8 actors (single-actor branches, no duplicater insert).
inline Spec random_routed_spec(Rng& rng, bool compact = false) {
    Spec s;
    s.name = "routed";
    auto add_actor = [&](std::string id, ActorKind k) {
        Actor a;
        a.id = std::move(id);
        a.kind = k;
        s.actors.push_back(a);
    };
    add_actor("src", ActorKind::Usual);
    add_actor("spl", ActorKind::Splitter);
    s.channels.push_back(make_channel("in", "src", 0, "spl", 0, Rational(1), Rational(1)));

    std::int64_t branches = pick(rng, 2, 3);
    bool with_discard = pick(rng, 0, 3) == 0 && branches > 2;
    std::int64_t discard_branch = with_discard ? pick(rng, 0, branches - 1) : -1;

    // a block of consecutive service slots is a single rational rate only
    // when it covers 1, q-1 or q of the q-slot cycle (other blocks are not
    // balanced words), so the counts are either all ones or a {1, k} pair
    std::vector<std::int64_t> counts;
    std::int64_t q = 0;
    if (branches == 2 && pick(rng, 0, 1) == 0) {
        std::int64_t k = pick(rng, 2, 3);
        if (pick(rng, 0, 1) == 0)
            counts = {1, k};
        else
            counts = {k, 1};
    } else {
        counts.assign(static_cast<std::size_t>(branches), 1);
    }
    for (auto c : counts) q += c;

    // branch bodies
    std::vector<std::string> tails;       // last actor of each joined branch
    std::vector<std::int64_t> tail_counts;
    for (std::int64_t i = 0; i < branches; ++i) {
        std::string branch_head;
        if (i == discard_branch) {
            add_actor("dis" + std::to_string(i), ActorKind::Discard);
            branch_head = "dis" + std::to_string(i);
            s.channels.push_back(make_channel("b" + std::to_string(i), "spl", static_cast<int>(i),
                                              branch_head, 0, Rational(counts[i], q), Rational(1)));
            continue;
        }
        std::string prev;
        std::int64_t depth = compact ? 1 : pick(rng, 1, 2);
        for (std::int64_t d = 0; d < depth; ++d) {
            std::string id = "w" + std::to_string(i) + "_" + std::to_string(d);
            add_actor(id, ActorKind::Usual);
            if (d == 0) {
                s.channels.push_back(make_channel("b" + std::to_string(i), "spl",
                                                  static_cast<int>(i), id, 0,
                                                  Rational(counts[i], q), Rational(1)));
            } else {
                s.channels.push_back(make_channel("c" + std::to_string(i) + "_" + std::to_string(d),
                                                  prev, 0, id, 0, Rational(1), Rational(1)));
            }
            prev = id;
        }
        tails.push_back(prev);
        tail_counts.push_back(counts[i]);
    }

    // occasionally run one branch through a duplicater that also feeds an
    // extra observer actor
    if (!compact && pick(rng, 0, 2) == 0 && !tails.empty()) {
        std::size_t k = static_cast<std::size_t>(pick(rng, 0, static_cast<std::int64_t>(tails.size()) - 1));
        add_actor("dup", ActorKind::Duplicater);
        add_actor("obs", ActorKind::Usual);
        s.channels.push_back(make_channel("dup_in", tails[k], 0, "dup", 0, Rational(1), Rational(1)));
        s.channels.push_back(make_channel("dup_obs", "dup", 1, "obs", 0, Rational(1), Rational(1)));
        add_actor("dupjoin", ActorKind::Usual);
        s.channels.push_back(make_channel("dup_join", "dup", 0, "dupjoin", 0, Rational(1), Rational(1)));
        tails[k] = "dupjoin";
    }

    std::int64_t joined_q = 0;
    for (auto c : tail_counts) joined_q += c;
    if (tails.size() >= 2) {
        add_actor("join", ActorKind::Joiner);
        add_actor("snk", ActorKind::Usual);
        // shuffled port order decouples the joiner cycle from the splitter's
        std::vector<std::size_t> order(tails.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            std::size_t i = order[pos];
            Rational init = pick(rng, 0, 2) == 0 ? Rational(pick(rng, 1, 2)) : Rational(0);
            s.channels.push_back(make_channel("j" + std::to_string(i), tails[i], 1,
                                              "join", static_cast<int>(pos),
                                              Rational(1), Rational(tail_counts[i], joined_q), init));
        }
        s.channels.push_back(make_channel("out", "join", 0, "snk", 0, Rational(1), Rational(1)));
    } else {
        add_actor("snk", ActorKind::Usual);
        s.channels.push_back(make_channel("out", tails.at(0), 1, "snk", 0, Rational(1), Rational(1)));
    }

    // densify ports per actor
    for (const auto& a : s.actors) {
        int next = 0;
        for (auto* c : s.outputs_of(a.id)) const_cast<Channel*>(c)->producer.port = next++;
        next = 0;
        for (auto* c : s.inputs_of(a.id)) const_cast<Channel*>(c)->consumer.port = next++;
    }
    return s;
}

// A random well-defined plain spec for the timing oracle: layered DAG,
// rational rates with small denominators, timed sources and sinks whose
// frequencies are derived from the repetition vector so one hyperperiod
// exists by construction. `fractional_only` suppresses whole initial
// tokens, keeping first-hyperperiod windows cyclic from job 1.
inline Spec random_timed_dag(Rng& rng, std::int64_t max_actors = 6, std::int64_t max_den = 6,
                             bool fractional_only = false) {
    Spec s;
    s.name = "timed_dag";
    std::int64_t n = pick(rng, 3, max_actors);
    for (std::int64_t i = 0; i < n; ++i) {
        Actor a;
        a.id = "v" + std::to_string(i);
        a.exec_time = ExecTime{Rational(pick(rng, 0, 4), 4), Rational(0)};
        a.exec_time->wcet_ms = a.exec_time->bcet_ms + Rational(pick(rng, 0, 4), 4);
        s.actors.push_back(a);
    }
    // chain + extra forward edges
    int cid = 0;
    auto rnd_rate = [&]() {
        std::int64_t den = pick(rng, 1, max_den);
        std::int64_t num = pick(rng, 1, den + 1);
        return Rational(num, den);
    };
    auto rnd_init = [&](const Rational& cons) {
        // fractional credit aligned with the consumer denominator plus an
        // occasional whole token
        std::int64_t d = cons.den();
        Rational r(pick(rng, 0, d - 1), d);
        if (!fractional_only && pick(rng, 0, 3) == 0) r += Rational(pick(rng, 1, 2));
        return r;
    };
    for (std::int64_t i = 0; i + 1 < n; ++i) {
        Rational prod = rnd_rate(), cons = rnd_rate();
        s.channels.push_back(make_channel("c" + std::to_string(cid++), "v" + std::to_string(i), 0,
                                          "v" + std::to_string(i + 1), 0, prod, cons,
                                          rnd_init(cons)));
    }
    // extra forward edges with a consumption rate derived from the chain's
    // balance, so the spec stays consistent by construction
    auto chain_verdict = consistency(s);
    std::int64_t extras = pick(rng, 0, 2);
    for (std::int64_t e = 0; e < extras; ++e) {
        std::int64_t i = pick(rng, 0, n - 2);
        std::int64_t j = pick(rng, i + 1, n - 1);
        Rational prod = rnd_rate();
        Rational cons = prod * Rational(chain_verdict.repetition.counts.at("v" + std::to_string(i))) /
                        Rational(chain_verdict.repetition.counts.at("v" + std::to_string(j)));
        s.channels.push_back(make_channel("c" + std::to_string(cid++), "v" + std::to_string(i), 1,
                                          "v" + std::to_string(j), 1, prod, cons, rnd_init(cons)));
    }
    for (const auto& a : s.actors) {
        int next = 0;
        for (auto* c : s.outputs_of(a.id)) const_cast<Channel*>(c)->producer.port = next++;
        next = 0;
        for (auto* c : s.inputs_of(a.id)) const_cast<Channel*>(c)->consumer.port = next++;
    }

    // derive frequencies: pick H, then f = 1000 * q_v / H for sources/sinks
    auto verdict = consistency(s);
    Rational H(pick(rng, 20, 60));
    for (auto& a : s.actors) {
        bool source = s.inputs_of(a.id).empty();
        bool sink = s.outputs_of(a.id).empty();
        if (source || sink) {
            Rational f = Rational(1000) * Rational(verdict.repetition.counts.at(a.id)) / H;
            a.timing = Timing{f, Rational(pick(rng, 0, 3), 2)};
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Brute-force timing oracle: expands every job of `horizon` hyperperiods and
// propagates earliest starts / latest finishes along explicit token
// dependencies found by linear scanning of integer cumulative counts.

struct OracleChannel {
    std::string producer, consumer;
    std::int64_t pn, pd;  // production rate pn/pd
    std::int64_t cn, cd;  // consumption rate cn/cd
    std::int64_t whole;   // floor(init)
    std::int64_t rn, rd;  // frac(init) = rn/rd
};

inline std::int64_t oracle_supply(const OracleChannel& c, std::int64_t m) {
    // floor(m * pn/pd + rn/rd), integers only
    return (m * c.pn * c.rd + c.rn * c.pd) / (c.pd * c.rd);
}

inline std::int64_t oracle_need(const OracleChannel& c, std::int64_t j) {
    // ceil(j * cn/cd - rn/rd)
    std::int64_t num = j * c.cn * c.rd - c.rn * c.cd;
    std::int64_t den = c.cd * c.rd;
    if (num <= 0) return 0;
    return (num + den - 1) / den;
}

struct BruteForceWindows {
    std::map<std::string, std::vector<Rational>> release;   // index 0 = job 1
    std::map<std::string, std::vector<Rational>> deadline;
};

inline BruteForceWindows brute_force_windows(const Spec& spec, std::int64_t horizon_periods = 4) {
    auto verdict = consistency(spec);
    if (!verdict.consistent) throw std::runtime_error("oracle needs a consistent spec");
    std::map<std::string, std::int64_t> jobs;
    for (const auto& [actor, q] : verdict.repetition.counts) jobs[actor] = q * horizon_periods;

    std::vector<OracleChannel> chans;
    for (const auto& c : spec.channels) {
        OracleChannel oc;
        oc.producer = c.producer.actor;
        oc.consumer = c.consumer.actor;
        oc.pn = c.production_rate.value.num();
        oc.pd = c.production_rate.value.den();
        oc.cn = c.consumption_rate.value.num();
        oc.cd = c.consumption_rate.value.den();
        oc.whole = c.initial_tokens.floor();
        Rational r = c.initial_tokens.frac();
        oc.rn = r.num();
        oc.rd = r.den();
        chans.push_back(oc);
    }

    auto exec = [&](const std::string& id) { return *spec.find_actor(id)->exec_time; };

    BruteForceWindows out;
    for (const auto& [actor, count] : jobs) {
        out.release[actor].assign(static_cast<std::size_t>(count), Rational(0));
        out.deadline[actor].assign(static_cast<std::size_t>(count), Rational(0));
    }

    // earliest starts: fixpoint iteration
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [actor, count] : jobs) {
            const Actor* a = spec.find_actor(actor);
            for (std::int64_t p = 1; p <= count; ++p) {
                Rational es(0);
                if (a->is_timed()) {
                    es = a->timing->period_ms() * Rational(p - 1) + a->timing->phase_ms;
                } else {
                    for (const auto& c : chans) {
                        if (c.consumer != actor) continue;
                        std::int64_t need = oracle_need(c, p) - c.whole;
                        if (need <= 0) continue;
                        std::int64_t alpha = 1;
                        while (oracle_supply(c, alpha) < need) ++alpha;  // linear scan
                        std::int64_t beta = 1;
                        while (oracle_need(c, beta) - c.whole <= oracle_supply(c, alpha - 1)) ++beta;
                        if (alpha > jobs.at(c.producer)) continue;  // tail of the horizon
                        Rational term = out.release[c.producer][static_cast<std::size_t>(alpha - 1)] +
                                        exec(c.producer).bcet_ms +
                                        Rational(p - beta) * exec(actor).bcet_ms;
                        if (term > es) es = term;
                    }
                }
                auto& slot = out.release[actor][static_cast<std::size_t>(p - 1)];
                if (slot != es) {
                    slot = es;
                    changed = true;
                }
            }
        }
    }

    // latest finishes: fixpoint; jobs whose consumers fall outside the
    // horizon only take their timed bound, which is why callers compare the
    // first hyperperiod only
    const Rational far(1000000);
    for (const auto& [actor, count] : jobs)
        for (std::int64_t i = 0; i < count; ++i)
            out.deadline[actor][static_cast<std::size_t>(i)] = far;
    changed = true;
    while (changed) {
        changed = false;
        for (const auto& [actor, count] : jobs) {
            const Actor* a = spec.find_actor(actor);
            for (std::int64_t nj = 1; nj <= count; ++nj) {
                Rational lf = far;
                if (a->is_timed()) lf = a->timing->period_ms() * Rational(nj) + a->timing->phase_ms;
                for (const auto& c : chans) {
                    if (c.producer != actor) continue;
                    std::int64_t alpha = 1;
                    while (oracle_need(c, alpha) - c.whole <= oracle_supply(c, nj - 1)) ++alpha;
                    if (alpha > jobs.at(c.consumer)) continue;  // beyond horizon
                    std::int64_t beta = 1;
                    while (oracle_supply(c, beta) < oracle_need(c, alpha) - c.whole) ++beta;
                    Rational term = out.deadline[c.consumer][static_cast<std::size_t>(alpha - 1)] -
                                    exec(c.consumer).wcet_ms -
                                    Rational(beta - nj) * exec(actor).wcet_ms;
                    if (term < lf) lf = term;
                }
                auto& slot = out.deadline[actor][static_cast<std::size_t>(nj - 1)];
                if (slot != lf) {
                    slot = lf;
                    changed = true;
                }
            }
        }
    }
    return out;
}

} // namespace rmdf::testgen

#endif
