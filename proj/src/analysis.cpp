#include "rmdf/analysis.hpp"

#include <algorithm>
#include <queue>

namespace rmdf {

TopologyMatrix build_topology_matrix(const Spec& spec) {
    if (spec.has_param_rates())
        throw analysis_error("topology matrix requires a spec without parametric rates");
    TopologyMatrix m;
    for (const auto& c : spec.channels) m.channel_ids.push_back(c.id);
    for (const auto& a : spec.actors) m.actor_ids.push_back(a.id);
    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < m.actor_ids.size(); ++j) col[m.actor_ids[j]] = j;
    for (const auto& c : spec.channels) {
        std::vector<Rational> row(m.actor_ids.size(), Rational(0));
        row[col.at(c.producer.actor)] += c.production_rate.value;
        row[col.at(c.consumer.actor)] -= c.consumption_rate.value;
        m.entries.push_back(std::move(row));
    }
    return m;
}

ConsistencyResult consistency(const Spec& spec) {
    if (spec.has_param_rates())
        throw analysis_error("consistency requires a spec without parametric rates");
    if (spec.actors.empty()) throw analysis_error("empty specification");
    if (!weakly_connected(spec)) throw analysis_error("specification is not weakly connected");

    ConsistencyResult res;

    // self-loops constrain rates, not the repetition vector
    for (const auto& c : spec.channels) {
        if (c.producer.actor != c.consumer.actor) continue;
        if (c.production_rate.value != c.consumption_rate.value) {
            res.witness = "self-loop '" + c.id + "' produces " + c.production_rate.value.str() +
                          " but consumes " + c.consumption_rate.value.str();
            return res;
        }
    }

    // propagate q ratios: q_prod * prod_rate = q_cons * cons_rate
    std::map<std::string, Rational> q;
    q[spec.actors.front().id] = Rational(1);
    std::queue<std::string> work;
    work.push(spec.actors.front().id);
    auto relax = [&](const Channel& c) -> bool {
        if (c.producer.actor == c.consumer.actor) return true;
        auto pi = q.find(c.producer.actor);
        auto ki = q.find(c.consumer.actor);
        if (pi == q.end() && ki == q.end()) return true;
        if (pi != q.end() && ki != q.end()) {
            if (pi->second * c.production_rate.value != ki->second * c.consumption_rate.value) {
                res.witness = "channel '" + c.id + "' implies " + c.consumer.actor + " = " +
                              (pi->second * c.production_rate.value / c.consumption_rate.value).str() +
                              " but another path gives " + ki->second.str();
                return false;
            }
            return true;
        }
        if (pi != q.end()) {
            q[c.consumer.actor] = pi->second * c.production_rate.value / c.consumption_rate.value;
            work.push(c.consumer.actor);
        } else {
            q[c.producer.actor] = ki->second * c.consumption_rate.value / c.production_rate.value;
            work.push(c.producer.actor);
        }
        return true;
    };
    while (!work.empty()) {
        std::string v = work.front();
        work.pop();
        for (const auto& c : spec.channels)
            if (c.producer.actor == v || c.consumer.actor == v)
                if (!relax(c)) return res;
    }
    // weak connectivity guarantees everything was reached; re-check all
    // channels once for cross constraints between already-assigned actors
    for (const auto& c : spec.channels)
        if (!relax(c)) return res;

    // scale to the least positive integer vector
    std::int64_t denom_lcm = 1;
    for (const auto& [v, r] : q) {
        (void)v;
        denom_lcm = lcm64(denom_lcm, r.den());
    }
    std::int64_t num_gcd = 0;
    for (const auto& [v, r] : q) {
        (void)v;
        num_gcd = gcd64(num_gcd, (r * Rational(denom_lcm)).num());
    }
    for (const auto& [v, r] : q)
        res.repetition.counts[v] = (r * Rational(denom_lcm, num_gcd)).num();

    // a hyperperiod returns the token state, so every channel must move a
    // whole number of tokens per period; scale up when a rational rate
    // leaves a fractional flow (the credit position would drift otherwise)
    std::int64_t flow_lcm = 1;
    for (const auto& c : spec.channels) {
        Rational flow =
            Rational(res.repetition.counts.at(c.producer.actor)) * c.production_rate.value;
        flow_lcm = lcm64(flow_lcm, flow.den());
    }
    if (flow_lcm > 1)
        for (auto& [v, n] : res.repetition.counts) {
            (void)v;
            n *= flow_lcm;
        }

    // timed actors must agree on one hyperperiod
    const Actor* first_timed = nullptr;
    Rational hyperperiod;
    for (const auto& a : spec.actors) {
        if (!a.is_timed()) continue;
        Rational h = Rational(res.repetition.counts.at(a.id)) * a.timing->period_ms();
        if (!first_timed) {
            first_timed = &a;
            hyperperiod = h;
        } else if (h != hyperperiod) {
            res.witness = "timed actors '" + first_timed->id + "' (" + hyperperiod.str() +
                          " ms) and '" + a.id + "' (" + h.str() + " ms) disagree on the hyperperiod";
            res.repetition.counts.clear();
            return res;
        }
    }
    if (first_timed) res.repetition.hyperperiod_ms = hyperperiod;
    res.consistent = true;
    return res;
}

LivenessResult liveness(const Spec& spec, const RepetitionVector& repetition,
                        DeciderPolicy policy) {
    LivenessResult res;
    ExecOptions opts;
    opts.policy = policy ? std::move(policy)
                         : DeciderPolicy([](const std::string&, std::int64_t) {
                               return ModeAssignment{};
                           });
    std::map<std::string, std::int64_t> targets;
    for (const auto& [actor, n] : repetition.counts) targets[actor] = n;
    auto before = state_signature(initial_state(spec));
    RunResult run = run_to_completion(spec, targets, std::move(opts));
    res.live = run.completed;
    res.deadlock = run.diagnosis;
    res.trace = std::move(run.trace);
    if (res.live) res.state_restored = state_signature(run.final_state) == before;
    return res;
}

bool AnalysisReport::all_consistent() const {
    return !modes.empty() &&
           std::all_of(modes.begin(), modes.end(), [](const ModeAnalysis& m) { return m.consistent; });
}

bool AnalysisReport::all_live() const {
    return !modes.empty() &&
           std::all_of(modes.begin(), modes.end(), [](const ModeAnalysis& m) { return m.live; });
}

AnalysisReport analyze_rmdf(const Spec& spec) {
    AnalysisReport report;
    report.spec_name = spec.name;
    report.structural = validate_structure(spec);
    if (!report.structural.empty()) return report;
    report.mode_coherence = check_mode_coherence(spec);
    if (!report.mode_coherence.empty()) return report;

    for (auto& [mode, mode_spec] : enumerate_mode_specs(spec)) {
        ModeAnalysis ma;
        ma.mode = mode;
        auto verdict = consistency(mode_spec);
        ma.consistent = verdict.consistent;
        ma.repetition = verdict.repetition;
        ma.consistency_witness = verdict.witness;
        if (ma.consistent) {
            ModeAssignment fixed = mode;
            auto lv = liveness(mode_spec, ma.repetition,
                               [fixed](const std::string&, std::int64_t) { return fixed; });
            ma.live = lv.live && lv.state_restored;
            if (!lv.live)
                ma.deadlock = lv.deadlock;
            else if (!lv.state_restored)
                ma.deadlock = "token state not restored after one hyperperiod";
        }
        report.modes.push_back(std::move(ma));
    }
    return report;
}

RunResult run_modal(const Spec& spec, const std::vector<ModeAssignment>& mode_sequence,
                    ExecOptions options) {
    std::map<std::string, std::int64_t> targets;
    for (const auto& a : spec.actors) targets[a.id] = 0;
    // deciders may fire several times per hyperperiod; each entry of the
    // sequence covers all firings of its hyperperiod
    std::vector<ModeAssignment> per_firing;
    for (const auto& mode : mode_sequence) {
        Spec sub = substitute_mode(spec, mode);
        auto verdict = consistency(sub);
        if (!verdict.consistent)
            throw analysis_error("mode spec inconsistent: " + verdict.witness);
        for (const auto& [actor, n] : verdict.repetition.counts) targets[actor] += n;
        std::int64_t decider_firings = 0;
        for (const auto& a : sub.actors)
            if (a.kind == ActorKind::ModeDecider)
                decider_firings = std::max(decider_firings, verdict.repetition.counts.at(a.id));
        for (std::int64_t i = 0; i < std::max<std::int64_t>(decider_firings, 1); ++i)
            per_firing.push_back(mode);
    }
    if (!options.policy) options.policy = mode_sequence_policy(std::move(per_firing));
    return run_to_completion(spec, targets, std::move(options));
}

} // namespace rmdf
