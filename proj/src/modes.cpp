#include "rmdf/modes.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace rmdf {

bool ControlArea::is_border(const std::string& actor) const {
    if (actor == decider) return true;
    auto in = [&](const std::vector<std::string>& v) {
        return std::find(v.begin(), v.end(), actor) != v.end();
    };
    return in(duplicaters) || in(controlled_splitters) || in(controlled_joiners);
}

namespace {

// Actors reachable from `start` following data channels, stopping at (and
// excluding) the given sinks. Self-loops are ignored.
std::set<std::string> forward_closure(const Spec& spec, const std::string& start,
                                      const std::set<std::string>& stop) {
    std::set<std::string> seen;
    std::queue<std::string> work;
    work.push(start);
    while (!work.empty()) {
        auto v = work.front();
        work.pop();
        for (const auto* c : spec.data_outputs_of(v)) {
            const std::string& w = c->consumer.actor;
            if (w == v || stop.count(w)) continue;
            if (seen.insert(w).second) work.push(w);
        }
    }
    return seen;
}

std::set<std::string> backward_closure(const Spec& spec, const std::string& start,
                                       const std::set<std::string>& stop) {
    std::set<std::string> seen;
    std::queue<std::string> work;
    work.push(start);
    while (!work.empty()) {
        auto v = work.front();
        work.pop();
        for (const auto* c : spec.data_inputs_of(v)) {
            const std::string& w = c->producer.actor;
            if (w == v || stop.count(w)) continue;
            if (seen.insert(w).second) work.push(w);
        }
    }
    return seen;
}

} // namespace

std::vector<ControlArea> compute_control_areas(const Spec& spec) {
    std::vector<ControlArea> areas;
    for (const auto& a : spec.actors) {
        if (a.kind != ActorKind::ModeDecider) continue;
        ControlArea area;
        area.decider = a.id;

        // follow the control fan-out: decider -> [duplicaters] -> cs/cj
        std::queue<std::string> work;
        work.push(a.id);
        while (!work.empty()) {
            auto v = work.front();
            work.pop();
            for (const auto* c : spec.control_outputs_of(v)) {
                const Actor* k = spec.find_actor(c->consumer.actor);
                if (!k) continue;
                if (k->kind == ActorKind::Duplicater) {
                    area.duplicaters.push_back(k->id);
                    work.push(k->id);
                } else if (k->kind == ActorKind::ControlledSplitter) {
                    area.controlled_splitters.push_back(k->id);
                } else if (k->kind == ActorKind::ControlledJoiner) {
                    area.controlled_joiners.push_back(k->id);
                }
            }
        }
        if (area.controlled_splitters.empty() && area.controlled_joiners.empty())
            throw mode_error("mode decider '" + a.id +
                             "' controls no splitter or joiner through its control channel");

        std::set<std::string> stop(area.controlled_joiners.begin(), area.controlled_joiners.end());
        std::set<std::string> stop_back(area.controlled_splitters.begin(),
                                        area.controlled_splitters.end());
        // intersection over all splitters of the forward closures, and over
        // all joiners of the backward closures
        std::set<std::string> fwd;
        bool first = true;
        for (const auto& cs : area.controlled_splitters) {
            auto r = forward_closure(spec, cs, stop);
            if (first) {
                fwd = std::move(r);
                first = false;
            } else {
                std::set<std::string> inter;
                std::set_intersection(fwd.begin(), fwd.end(), r.begin(), r.end(),
                                      std::inserter(inter, inter.begin()));
                fwd = std::move(inter);
            }
        }
        std::set<std::string> bwd;
        first = true;
        for (const auto& cj : area.controlled_joiners) {
            auto r = backward_closure(spec, cj, stop_back);
            if (first) {
                bwd = std::move(r);
                first = false;
            } else {
                std::set<std::string> inter;
                std::set_intersection(bwd.begin(), bwd.end(), r.begin(), r.end(),
                                      std::inserter(inter, inter.begin()));
                bwd = std::move(inter);
            }
        }
        std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(),
                              std::inserter(area.members, area.members.begin()));
        for (const auto& b : area.duplicaters) area.members.erase(b);
        area.members.erase(area.decider);

        // per-branch actor lists, one per controlled-splitter output port
        for (const auto& cs : area.controlled_splitters) {
            for (const auto* c : spec.data_outputs_of(cs)) {
                std::string param = c->production_rate.is_param() ? c->production_rate.param
                                                                  : c->production_rate.str();
                std::vector<std::string> chain;
                std::set<std::string> seen;
                std::string cur = c->consumer.actor;
                while (area.members.count(cur) && seen.insert(cur).second) {
                    chain.push_back(cur);
                    std::string next;
                    for (const auto* oc : spec.data_outputs_of(cur)) {
                        if (oc->consumer.actor == cur) continue;  // self-loop
                        if (area.members.count(oc->consumer.actor)) next = oc->consumer.actor;
                    }
                    if (next.empty()) break;
                    cur = next;
                }
                area.branches.emplace_back(param, std::move(chain));
            }
        }
        areas.push_back(std::move(area));
    }

    // nesting check: no decider or controlled actor may sit inside another
    // decider's member set
    for (const auto& outer : areas)
        for (const auto& inner : areas) {
            if (outer.decider == inner.decider) continue;
            if (outer.members.count(inner.decider))
                throw mode_error("nested control areas: decider '" + inner.decider +
                                 "' lies inside the control area of '" + outer.decider + "'");
        }
    return areas;
}

namespace {

struct Labeler {
    const Spec& spec;
    // channel id -> set of (decider, branch index) labels
    std::map<std::string, std::set<std::pair<std::string, int>>> labels;
    std::set<std::string> on_stack;
    ModeDependencyResult result;

    bool label_channel(const Channel& c, const std::pair<std::string, int>& mode) {
        auto& set = labels[c.id];
        set.insert(mode);
        if (set.size() >= 2) {
            if (result.single) {
                result.single = false;
                result.witness_channel = c.id;
            }
            return false;
        }
        return true;
    }

    // walk forward from `actor`, labeling its output channels, stopping at
    // controlled joiners
    bool visit(const std::string& actor, const std::pair<std::string, int>& mode) {
        if (on_stack.count(actor))
            throw mode_error("cycle through actor '" + actor +
                             "' inside a conditional branch; loops within a branch are not "
                             "supported");
        on_stack.insert(actor);
        for (const auto* c : spec.data_outputs_of(actor)) {
            if (c->consumer.actor == actor) continue;  // self-loops sit on the actor
            if (!label_channel(*c, mode)) {
                on_stack.erase(actor);
                return false;
            }
            const Actor* k = spec.find_actor(c->consumer.actor);
            if (k && k->kind == ActorKind::ControlledJoiner) continue;
            if (!visit(c->consumer.actor, mode)) {
                on_stack.erase(actor);
                return false;
            }
        }
        on_stack.erase(actor);
        return true;
    }
};

} // namespace

ModeDependencyResult check_single_mode_dependency(const Spec& spec) {
    auto areas = compute_control_areas(spec);
    Labeler lab{spec, {}, {}, {}};
    for (const auto& area : areas) {
        for (const auto& cs : area.controlled_splitters) {
            int branch = 0;
            for (const auto* c : spec.data_outputs_of(cs)) {
                std::pair<std::string, int> mode{area.decider, branch++};
                const Actor* k = spec.find_actor(c->consumer.actor);
                if (k && k->kind == ActorKind::ControlledJoiner) continue;
                if (!lab.visit(c->consumer.actor, mode)) return lab.result;
            }
        }
    }
    return lab.result;
}

std::vector<Violation> check_mode_coherence(const Spec& spec) {
    std::vector<Violation> out;
    std::vector<ControlArea> areas;
    try {
        areas = compute_control_areas(spec);
    } catch (const mode_error& e) {
        out.push_back({"control-area", spec.name, "", e.what()});
        return out;
    }
    if (areas.empty()) return out;

    // R1: single mode dependency
    try {
        auto dep = check_single_mode_dependency(spec);
        if (!dep.single)
            out.push_back({"R1", dep.witness_channel, "2 conditioning modes",
                           "channel is conditioned by two execution modes"});
    } catch (const mode_error& e) {
        out.push_back({"R1", spec.name, "", e.what()});
    }

    // R2: no channel across a control-area boundary (border actors exempt)
    for (const auto& area : areas) {
        for (const auto& c : spec.channels) {
            bool p_in = area.members.count(c.producer.actor) > 0;
            bool k_in = area.members.count(c.consumer.actor) > 0;
            if (p_in == k_in) continue;
            const std::string& outside = p_in ? c.consumer.actor : c.producer.actor;
            if (area.is_border(outside)) continue;
            out.push_back({"R2", c.id, outside,
                           p_in ? "channel leaves the control area of '" + area.decider + "'"
                                : "channel enters the control area of '" + area.decider + "'"});
        }
    }

    // R3: all timed actors of an area share one frequency
    for (const auto& area : areas) {
        const Actor* first_timed = nullptr;
        for (const auto& m : area.members) {
            const Actor* a = spec.find_actor(m);
            if (!a || !a->is_timed()) continue;
            if (!first_timed) {
                first_timed = a;
            } else if (a->timing->frequency_hz != first_timed->timing->frequency_hz) {
                out.push_back({"R3", a->id,
                               a->timing->frequency_hz.str() + " Hz vs " +
                                   first_timed->timing->frequency_hz.str() + " Hz",
                               "timed actors inside the control area of '" + area.decider +
                                   "' have different frequencies"});
            }
        }
    }

    // R4: constant rates touching an area are 0 or 1
    for (const auto& area : areas) {
        for (const auto& c : spec.channels) {
            bool touches = area.members.count(c.producer.actor) || area.members.count(c.consumer.actor);
            if (!touches) continue;
            auto check = [&](const RateExpr& r, const char* side) {
                if (r.is_const() && r.value != Rational(1) && !r.value.is_zero())
                    out.push_back({"R4", c.id, r.value.str(),
                                   std::string(side) + " rate inside the control area of '" +
                                       area.decider + "' must be 0 or 1"});
            };
            check(c.production_rate, "production");
            check(c.consumption_rate, "consumption");
        }
    }

    // R5: assigned parametric rates of every controlled actor sum to 1 in
    // every mode
    for (const auto& area : areas) {
        auto check_sum = [&](const std::string& actor, bool production) {
            auto ports = production ? spec.data_outputs_of(actor) : spec.data_inputs_of(actor);
            for (std::size_t i = 0; i < spec.mode_table.modes.size(); ++i) {
                const auto& mode = spec.mode_table.modes[i];
                Rational sum(0);
                bool all_bound = true;
                for (const auto* c : ports) {
                    const RateExpr& r = production ? c->production_rate : c->consumption_rate;
                    if (r.is_param()) {
                        auto it = mode.find(r.param);
                        if (it == mode.end()) {
                            all_bound = false;
                            break;
                        }
                        sum += Rational(it->second);
                    } else {
                        sum += r.value;
                    }
                }
                if (all_bound && sum != Rational(1))
                    out.push_back({"R5", actor, sum.str(),
                                   "mode " + std::to_string(i) + " assigns rates summing to " +
                                       sum.str() + " instead of 1"});
            }
        };
        for (const auto& cs : area.controlled_splitters) check_sum(cs, true);
        for (const auto& cj : area.controlled_joiners) check_sum(cj, false);
    }
    if (spec.mode_table.modes.empty() && spec.has_param_rates())
        out.push_back({"R5", spec.name, "0 modes",
                       "parametric rates are present but the mode table is empty"});
    return out;
}

Spec substitute_mode(const Spec& spec, const ModeAssignment& mode) {
    if (!spec.mode_table.modes.empty()) {
        bool found = std::any_of(spec.mode_table.modes.begin(), spec.mode_table.modes.end(),
                                 [&](const ModeAssignment& m) { return m == mode; });
        if (!found) throw mode_error("mode is not a row of the specification's mode table");
    } else if (!mode.empty()) {
        throw mode_error("mode is not a row of the specification's mode table");
    }
    auto params = spec.referenced_params();
    for (const auto& [p, v] : mode) {
        (void)v;
        if (std::find(params.begin(), params.end(), p) == params.end())
            throw mode_error("mode assigns parameter '" + p + "' absent from the specification");
    }

    Spec out = spec;
    out.mode_table = ModeTable{};

    // bind parameters; drop channels whose rate became 0
    std::vector<Channel> kept;
    for (auto c : out.channels) {
        auto bind = [&](RateExpr& r) {
            if (!r.is_param()) return;
            auto it = mode.find(r.param);
            if (it == mode.end())
                throw mode_error("mode does not assign parameter '" + r.param + "'");
            r = RateExpr::constant(Rational(it->second));
        };
        bind(c.production_rate);
        bind(c.consumption_rate);
        if (c.production_rate.value.is_zero() || c.consumption_rate.value.is_zero()) continue;
        kept.push_back(std::move(c));
    }
    out.channels = std::move(kept);

    // prune conditional actors whose branch is off: former area members with
    // no remaining live path controlled splitter -> ... -> controlled joiner
    std::vector<ControlArea> areas;
    try {
        areas = compute_control_areas(spec);
    } catch (const mode_error&) {
        areas.clear();
    }
    std::set<std::string> dead;
    for (const auto& area : areas) {
        std::set<std::string> stop(area.controlled_joiners.begin(), area.controlled_joiners.end());
        std::set<std::string> stop_back(area.controlled_splitters.begin(),
                                        area.controlled_splitters.end());
        std::set<std::string> fwd;
        for (const auto& cs : area.controlled_splitters) {
            auto r = forward_closure(out, cs, stop);
            fwd.insert(r.begin(), r.end());
        }
        std::set<std::string> bwd;
        for (const auto& cj : area.controlled_joiners) {
            auto r = backward_closure(out, cj, stop_back);
            bwd.insert(r.begin(), r.end());
        }
        for (const auto& m : area.members)
            if (!fwd.count(m) || !bwd.count(m)) dead.insert(m);
    }
    if (!dead.empty()) {
        out.actors.erase(std::remove_if(out.actors.begin(), out.actors.end(),
                                        [&](const Actor& a) { return dead.count(a.id) > 0; }),
                         out.actors.end());
        out.channels.erase(std::remove_if(out.channels.begin(), out.channels.end(),
                                          [&](const Channel& c) {
                                              return dead.count(c.producer.actor) ||
                                                     dead.count(c.consumer.actor);
                                          }),
                          out.channels.end());
    }

    // densify ports freed by removed channels, preserving relative order
    for (const auto& a : out.actors) {
        auto renumber = [&](std::vector<const Channel*> chans, bool producer_side) {
            int next = 0;
            for (const auto* c : chans) {
                auto* mc = const_cast<Channel*>(c);
                (producer_side ? mc->producer.port : mc->consumer.port) = next++;
            }
        };
        renumber(out.outputs_of(a.id), true);
        renumber(out.inputs_of(a.id), false);
    }
    return out;
}

std::vector<std::pair<ModeAssignment, Spec>> enumerate_mode_specs(const Spec& spec) {
    std::vector<std::pair<ModeAssignment, Spec>> out;
    if (spec.mode_table.modes.empty()) {
        if (spec.has_param_rates())
            throw mode_error("parametric rates are present but the mode table is empty");
        out.emplace_back(ModeAssignment{}, spec);
        return out;
    }
    for (const auto& mode : spec.mode_table.modes)
        out.emplace_back(mode, substitute_mode(spec, mode));
    return out;
}

} // namespace rmdf
