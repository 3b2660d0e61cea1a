#include "rmdf/validate.hpp"

#include <map>
#include <queue>
#include <set>

namespace rmdf {

bool weakly_connected(const Spec& spec) {
    if (spec.actors.size() <= 1) return true;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& c : spec.channels) {
        adj[c.producer.actor].push_back(c.consumer.actor);
        adj[c.consumer.actor].push_back(c.producer.actor);
    }
    std::set<std::string> seen;
    std::queue<std::string> work;
    work.push(spec.actors.front().id);
    seen.insert(spec.actors.front().id);
    while (!work.empty()) {
        auto v = work.front();
        work.pop();
        for (const auto& w : adj[v])
            if (seen.insert(w).second) work.push(w);
    }
    return seen.size() == spec.actors.size();
}

namespace {

struct Checker {
    const Spec& spec;
    std::vector<Violation> out;

    void add(std::string rule, std::string element, std::string observed, std::string message) {
        out.push_back({std::move(rule), std::move(element), std::move(observed), std::move(message)});
    }

    void check_ids() {
        std::set<std::string> actor_ids;
        for (const auto& a : spec.actors)
            if (!actor_ids.insert(a.id).second)
                add("duplicate-actor-id", a.id, "", "actor id appears more than once");
        std::set<std::string> channel_ids;
        for (const auto& c : spec.channels) {
            if (!channel_ids.insert(c.id).second)
                add("duplicate-channel-id", c.id, "", "channel id appears more than once");
            if (!spec.find_actor(c.producer.actor))
                add("unknown-actor", c.id, c.producer.actor, "channel producer does not exist");
            if (!spec.find_actor(c.consumer.actor))
                add("unknown-actor", c.id, c.consumer.actor, "channel consumer does not exist");
        }
    }

    void check_ports() {
        for (const auto& a : spec.actors) {
            auto dense = [&](const std::vector<const Channel*>& chans, bool producer_side,
                             const char* what) {
                std::set<int> ports;
                for (const auto* c : chans) {
                    int p = producer_side ? c->producer.port : c->consumer.port;
                    if (!ports.insert(p).second)
                        add("port-collision", a.id, std::to_string(p),
                            std::string(what) + " port used by two channels");
                }
                int expect = 0;
                for (int p : ports)
                    if (p != expect++) {
                        add("port-not-dense", a.id, std::to_string(p),
                            std::string(what) + " port indices must be 0..k");
                        break;
                    }
            };
            dense(spec.outputs_of(a.id), true, "output");
            dense(spec.inputs_of(a.id), false, "input");
        }
    }

    void check_actor_attrs() {
        for (const auto& a : spec.actors) {
            if (a.timing) {
                if (!(a.timing->frequency_hz > Rational(0)))
                    add("frequency-not-positive", a.id, a.timing->frequency_hz.str(),
                        "frequency must be > 0");
                if (a.timing->phase_ms.is_negative())
                    add("phase-negative", a.id, a.timing->phase_ms.str(), "phase must be >= 0");
            }
            if (a.exec_time) {
                if (a.exec_time->bcet_ms.is_negative())
                    add("bcet-negative", a.id, a.exec_time->bcet_ms.str(), "bcet must be >= 0");
                if (a.exec_time->wcet_ms < a.exec_time->bcet_ms)
                    add("bcet-above-wcet", a.id,
                        a.exec_time->bcet_ms.str() + " > " + a.exec_time->wcet_ms.str(),
                        "bcet must not exceed wcet");
            }
        }
    }

    // Sum of constant rates; nullopt when any rate is parametric.
    static std::optional<Rational> const_sum(const std::vector<const Channel*>& chans,
                                             bool production) {
        Rational sum(0);
        for (const auto* c : chans) {
            const RateExpr& r = production ? c->production_rate : c->consumption_rate;
            if (r.is_param()) return std::nullopt;
            sum += r.value;
        }
        return sum;
    }

    void check_routing_arities() {
        for (const auto& a : spec.actors) {
            auto data_in = spec.data_inputs_of(a.id);
            auto data_out = spec.data_outputs_of(a.id);
            auto ctrl_in = spec.control_inputs_of(a.id);
            auto ctrl_out = spec.control_outputs_of(a.id);
            switch (a.kind) {
                case ActorKind::Splitter: {
                    if (data_in.size() != 1 || !ctrl_in.empty())
                        add("splitter-arity", a.id, std::to_string(data_in.size()),
                            "splitter needs exactly one data input");
                    if (data_out.empty())
                        add("splitter-arity", a.id, "0", "splitter needs at least one output");
                    if (data_in.size() == 1) {
                        const RateExpr& r = data_in[0]->consumption_rate;
                        if (!r.is_const() || r.value != Rational(1))
                            add("splitter-input-rate", a.id, r.str(),
                                "splitter consumes exactly one token per job");
                    }
                    if (auto sum = const_sum(data_out, true)) {
                        if (*sum != Rational(1))
                            add("splitter-output-sum", a.id, sum->str(),
                                "splitter output production rates must sum to 1");
                    } else {
                        add("param-rate-placement", a.id, "",
                            "plain splitter cannot carry parametric rates");
                    }
                    break;
                }
                case ActorKind::Joiner: {
                    if (data_out.size() != 1 || !ctrl_in.empty())
                        add("joiner-arity", a.id, std::to_string(data_out.size()),
                            "joiner needs exactly one data output");
                    if (data_in.empty())
                        add("joiner-arity", a.id, "0", "joiner needs at least one input");
                    if (data_out.size() == 1) {
                        const RateExpr& r = data_out[0]->production_rate;
                        if (!r.is_const() || r.value != Rational(1))
                            add("joiner-output-rate", a.id, r.str(),
                                "joiner produces exactly one token per job");
                    }
                    if (auto sum = const_sum(data_in, false)) {
                        if (*sum != Rational(1))
                            add("joiner-input-sum", a.id, sum->str(),
                                "joiner input consumption rates must sum to 1");
                    } else {
                        add("param-rate-placement", a.id, "",
                            "plain joiner cannot carry parametric rates");
                    }
                    break;
                }
                case ActorKind::Duplicater: {
                    if (data_in.size() + ctrl_in.size() != 1)
                        add("duplicater-arity", a.id, std::to_string(data_in.size() + ctrl_in.size()),
                            "duplicater needs exactly one input");
                    if (data_out.size() + ctrl_out.size() < 1)
                        add("duplicater-arity", a.id, "0", "duplicater needs at least one output");
                    for (const auto* c : spec.inputs_of(a.id))
                        if (!c->consumption_rate.is_const() || c->consumption_rate.value != Rational(1))
                            add("duplicater-rate", a.id, c->consumption_rate.str(),
                                "duplicater moves one token per job");
                    for (const auto* c : spec.outputs_of(a.id))
                        if (!c->production_rate.is_const() || c->production_rate.value != Rational(1))
                            add("duplicater-rate", a.id, c->production_rate.str(),
                                "duplicater moves one token per job");
                    break;
                }
                case ActorKind::Discard: {
                    if (data_in.size() != 1 || !ctrl_in.empty())
                        add("discard-arity", a.id, std::to_string(data_in.size()),
                            "discard needs exactly one data input");
                    if (!data_out.empty() || !ctrl_out.empty())
                        add("discard-arity", a.id, std::to_string(data_out.size()),
                            "discard has no outputs");
                    break;
                }
                case ActorKind::ControlledSplitter: {
                    if (data_in.size() != 1)
                        add("controlled-splitter-arity", a.id, std::to_string(data_in.size()),
                            "controlled splitter needs exactly one data input");
                    if (ctrl_in.size() != 1)
                        add("controlled-splitter-arity", a.id, std::to_string(ctrl_in.size()),
                            "controlled splitter needs exactly one control input");
                    if (data_out.empty())
                        add("controlled-splitter-arity", a.id, "0",
                            "controlled splitter needs at least one output");
                    if (data_in.size() == 1) {
                        const RateExpr& r = data_in[0]->consumption_rate;
                        if (!r.is_const() || r.value != Rational(1))
                            add("controlled-splitter-input-rate", a.id, r.str(),
                                "controlled splitter consumes one token at a time");
                    }
                    for (const auto* c : data_out)
                        if (c->production_rate.is_const() && c->production_rate.value != Rational(1))
                            add("controlled-rate", a.id, c->production_rate.str(),
                                "controlled splitter output rates are parameters or 1");
                    break;
                }
                case ActorKind::ControlledJoiner: {
                    if (data_out.size() != 1)
                        add("controlled-joiner-arity", a.id, std::to_string(data_out.size()),
                            "controlled joiner needs exactly one data output");
                    if (ctrl_in.size() != 1)
                        add("controlled-joiner-arity", a.id, std::to_string(ctrl_in.size()),
                            "controlled joiner needs exactly one control input");
                    if (data_in.empty())
                        add("controlled-joiner-arity", a.id, "0",
                            "controlled joiner needs at least one input");
                    if (data_out.size() == 1) {
                        const RateExpr& r = data_out[0]->production_rate;
                        if (!r.is_const() || r.value != Rational(1))
                            add("controlled-joiner-output-rate", a.id, r.str(),
                                "controlled joiner produces one token at a time");
                    }
                    for (const auto* c : data_in)
                        if (c->consumption_rate.is_const() && c->consumption_rate.value != Rational(1))
                            add("controlled-rate", a.id, c->consumption_rate.str(),
                                "controlled joiner input rates are parameters or 1");
                    break;
                }
                case ActorKind::ModeDecider: {
                    if (data_in.size() != 1 || !ctrl_in.empty())
                        add("mode-decider-arity", a.id, std::to_string(data_in.size()),
                            "mode decider needs exactly one data input");
                    if (ctrl_out.size() != 1 || !data_out.empty())
                        add("mode-decider-arity", a.id, std::to_string(ctrl_out.size()),
                            "mode decider needs exactly one control output");
                    break;
                }
                case ActorKind::Usual: {
                    if (!ctrl_in.empty())
                        add("control-channel-endpoint", a.id, "",
                            "usual actor cannot consume control tokens");
                    break;
                }
            }
        }
    }

    // A control channel must originate at a mode decider or at a duplicater
    // transitively fed by one, and end at a controlled actor or duplicater.
    void check_control_channels() {
        auto fed_by_decider = [&](const std::string& dup) {
            std::string cur = dup;
            for (std::size_t hop = 0; hop <= spec.actors.size(); ++hop) {
                auto ins = spec.inputs_of(cur);
                if (ins.size() != 1) return false;
                const Actor* p = spec.find_actor(ins[0]->producer.actor);
                if (!p) return false;
                if (p->kind == ActorKind::ModeDecider) return ins[0]->is_control;
                if (p->kind != ActorKind::Duplicater || !ins[0]->is_control) return false;
                cur = p->id;
            }
            return false;
        };
        for (const auto& c : spec.channels) {
            if (!c.is_control) {
                const Actor* p = spec.find_actor(c.producer.actor);
                if (p && p->kind == ActorKind::ModeDecider)
                    add("control-channel-origin", c.id, "",
                        "mode decider output must be a control channel");
                continue;
            }
            const Actor* p = spec.find_actor(c.producer.actor);
            const Actor* k = spec.find_actor(c.consumer.actor);
            if (!p || !k) continue;
            bool good_origin = p->kind == ActorKind::ModeDecider ||
                               (p->kind == ActorKind::Duplicater && fed_by_decider(p->id));
            if (!good_origin)
                add("control-channel-origin", c.id, p->id,
                    "control channel must come from a mode decider (possibly via a duplicater)");
            if (!is_controlled(k->kind) && k->kind != ActorKind::Duplicater)
                add("control-channel-endpoint", c.id, k->id,
                    "control channel must end at a controlled splitter/joiner or duplicater");
            auto rate_is_one = [](const RateExpr& r) {
                return r.is_const() && r.value == Rational(1);
            };
            if (!rate_is_one(c.production_rate) || !rate_is_one(c.consumption_rate))
                add("control-channel-rate", c.id,
                    c.production_rate.str() + "," + c.consumption_rate.str(),
                    "control channels carry one token per job");
        }
    }

    void check_param_placement() {
        for (const auto& c : spec.channels) {
            if (c.production_rate.is_param()) {
                const Actor* p = spec.find_actor(c.producer.actor);
                if (!p || p->kind != ActorKind::ControlledSplitter)
                    add("param-rate-placement", c.id, c.production_rate.param,
                        "parametric production rates only on controlled splitter outputs");
            }
            if (c.consumption_rate.is_param()) {
                const Actor* k = spec.find_actor(c.consumer.actor);
                if (!k || k->kind != ActorKind::ControlledJoiner)
                    add("param-rate-placement", c.id, c.consumption_rate.param,
                        "parametric consumption rates only on controlled joiner inputs");
            }
        }
        // every referenced parameter must be assigned by every mode row
        for (const auto& p : spec.referenced_params())
            for (std::size_t i = 0; i < spec.mode_table.modes.size(); ++i)
                if (!spec.mode_table.modes[i].count(p))
                    add("mode-incomplete", p, "mode " + std::to_string(i),
                        "mode row does not assign this parameter");
    }

    void check_channels() {
        for (const auto& c : spec.channels) {
            if (c.initial_tokens.is_negative())
                add("init-negative", c.id, c.initial_tokens.str(), "initial tokens must be >= 0");
            if (c.production_rate.is_const() && c.production_rate.value.is_zero())
                add("rate-zero", c.id, "prod", "rates must be nonzero");
            if (c.consumption_rate.is_const() && c.consumption_rate.value.is_zero())
                add("rate-zero", c.id, "cons", "rates must be nonzero");
            if (c.production_rate.is_const() && c.production_rate.value.is_negative())
                add("rate-negative", c.id, c.production_rate.str(), "rates must be positive");
            if (c.consumption_rate.is_const() && c.consumption_rate.value.is_negative())
                add("rate-negative", c.id, c.consumption_rate.str(), "rates must be positive");
        }
    }

    void run() {
        check_ids();
        if (!out.empty()) return;  // later checks assume resolvable ids
        check_ports();
        check_actor_attrs();
        check_channels();
        check_routing_arities();
        check_control_channels();
        check_param_placement();
        if (!weakly_connected(spec))
            add("not-weakly-connected", spec.name, "",
                "the undirected form of the graph has more than one component");
    }
};

} // namespace

std::vector<Violation> validate_structure(const Spec& spec) {
    Checker ck{spec, {}};
    ck.run();
    return ck.out;
}

} // namespace rmdf
