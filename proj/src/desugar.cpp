#include "rmdf/desugar.hpp"

#include <algorithm>

#include "rmdf/rate.hpp"
#include "rmdf/validate.hpp"

namespace rmdf {

namespace {

bool rate_is_one(const RateExpr& r) { return r.is_const() && r.value == Rational(1); }

// Common cycle length q for a splitter's outputs (or a joiner's inputs):
// rates are n_k/q with sum 1.
std::int64_t cycle_length(const std::vector<Channel>& ports, bool production) {
    std::int64_t q = 1;
    for (const auto& c : ports) {
        const RateExpr& r = production ? c.production_rate : c.consumption_rate;
        q = lcm64(q, r.value.den());
    }
    return q;
}

// Service pattern of the port covering slots [offset+1, offset+count] of a
// q-slot cycle.
TokenSequence service_pattern(std::int64_t q, std::int64_t offset, std::int64_t count) {
    TokenSequence s(static_cast<std::size_t>(q), 0);
    for (std::int64_t i = 0; i < count; ++i)
        s[static_cast<std::size_t>(offset + i)] = 1;
    return s;
}

struct Rewriter {
    Spec spec;
    std::vector<std::string> warnings;
    int fresh_port = 1 << 20;  // temporary indices, densified at the end

    std::vector<Channel> copy_inputs(const std::string& id) {
        std::vector<Channel> v;
        for (const auto* c : spec.inputs_of(id)) v.push_back(*c);
        return v;
    }

    std::vector<Channel> copy_outputs(const std::string& id) {
        std::vector<Channel> v;
        for (const auto* c : spec.outputs_of(id)) v.push_back(*c);
        return v;
    }

    void erase_actor(std::string id) {
        spec.actors.erase(std::remove_if(spec.actors.begin(), spec.actors.end(),
                                         [&](const Actor& a) { return a.id == id; }),
                          spec.actors.end());
    }

    void erase_channel(std::string id) {
        spec.channels.erase(std::remove_if(spec.channels.begin(), spec.channels.end(),
                                           [&](const Channel& c) { return c.id == id; }),
                            spec.channels.end());
    }

    void remove_splitter(const std::string& id) {
        std::vector<Channel> ins = copy_inputs(id);
        std::vector<Channel> outs = copy_outputs(id);
        const Channel& in = ins.at(0);
        if (!rate_is_one(in.production_rate))
            throw desugar_error("splitter '" + id + "': producer-side rate of its input must be 1 "
                                "(chained routing actors of the same kind are not expressible)");
        if (!in.initial_tokens.is_zero())
            throw desugar_error("splitter '" + id + "': initial tokens on the input channel are "
                                "not supported");
        std::int64_t q = cycle_length(outs, true);
        std::int64_t offset = 0;
        std::vector<Channel> fresh;
        for (const auto& c : outs) {
            if (!c.consumption_rate.is_const() || !c.consumption_rate.value.is_integer())
                throw desugar_error("splitter '" + id + "': consumer-side rate of output '" +
                                    c.id + "' must be an integer");
            std::int64_t count = (c.production_rate.value * Rational(q)).num();
            auto derived = rate_init_from_production_sequence(service_pattern(q, offset, count));
            if (!derived || derived->rate != c.production_rate.value)
                throw desugar_error("splitter '" + id + "': the service pattern of output '" +
                                    c.id + "' (" + std::to_string(count) + " consecutive slots of " +
                                    std::to_string(q) + ") is not expressible as one rational rate");
            offset += count;
            Channel nc = c;
            nc.producer = PortRef{in.producer.actor, fresh_port++};
            nc.initial_tokens = Rational(c.initial_tokens.floor()) + derived->initial_tokens;
            fresh.push_back(std::move(nc));
        }
        for (const auto& c : outs) erase_channel(c.id);
        erase_channel(in.id);
        erase_actor(id);
        for (auto& nc : fresh) spec.channels.push_back(std::move(nc));
    }

    void remove_joiner(const std::string& id) {
        std::vector<Channel> ins = copy_inputs(id);
        std::vector<Channel> outs = copy_outputs(id);
        const Channel& out = outs.at(0);
        if (!rate_is_one(out.consumption_rate))
            throw desugar_error("joiner '" + id + "': consumer-side rate of its output must be 1 "
                                "(chained routing actors of the same kind are not expressible)");
        if (!out.initial_tokens.is_zero())
            throw desugar_error("joiner '" + id + "': initial tokens on the output channel are "
                                "not supported");
        std::int64_t q = cycle_length(ins, false);
        std::int64_t offset = 0;
        std::vector<Channel> fresh;
        for (const auto& c : ins) {
            if (!c.production_rate.is_const() || !c.production_rate.value.is_integer())
                throw desugar_error("joiner '" + id + "': producer-side rate of input '" +
                                    c.id + "' must be an integer");
            std::int64_t count = (c.consumption_rate.value * Rational(q)).num();
            auto derived = rate_init_from_consumption_sequence(service_pattern(q, offset, count));
            if (!derived || derived->rate != c.consumption_rate.value)
                throw desugar_error("joiner '" + id + "': the service pattern of input '" + c.id +
                                    "' (" + std::to_string(count) + " consecutive slots of " +
                                    std::to_string(q) + ") is not expressible as one rational rate");
            offset += count;
            Channel nc = c;
            nc.consumer = PortRef{out.consumer.actor, fresh_port++};
            nc.initial_tokens = Rational(c.initial_tokens.floor()) + derived->initial_tokens;
            fresh.push_back(std::move(nc));
        }
        for (const auto& c : ins) erase_channel(c.id);
        erase_channel(out.id);
        erase_actor(id);
        for (auto& nc : fresh) spec.channels.push_back(std::move(nc));
    }

    void remove_duplicater(const std::string& id) {
        std::vector<Channel> ins = copy_inputs(id);
        std::vector<Channel> outs = copy_outputs(id);
        const Channel& in = ins.at(0);
        if (!in.production_rate.is_const())
            throw desugar_error("duplicater '" + id + "': parametric input rate");
        std::vector<Channel> fresh;
        for (const auto& c : outs) {
            Channel nc = c;
            nc.producer = PortRef{in.producer.actor, fresh_port++};
            nc.production_rate = in.production_rate;
            nc.initial_tokens = in.initial_tokens + c.initial_tokens;
            fresh.push_back(std::move(nc));
        }
        for (const auto& c : outs) erase_channel(c.id);
        erase_channel(in.id);
        erase_actor(id);
        for (auto& nc : fresh) spec.channels.push_back(std::move(nc));
    }

    void remove_discard(const std::string& id) {
        std::vector<Channel> ins = copy_inputs(id);
        for (const auto& c : ins) {
            erase_channel(c.id);
            if (spec.outputs_of(c.producer.actor).empty() && spec.inputs_of(c.producer.actor).empty())
                warnings.push_back("dead branch: actor '" + c.producer.actor +
                                   "' only fed a discard and is now disconnected");
        }
        erase_actor(id);
    }

    // Discards go last: a splitter removal may retarget a channel onto a
    // discard, and the service pattern still needs the discard's slots.
    bool step() {
        for (const auto& a : spec.actors) {
            if (a.kind == ActorKind::Splitter) {
                remove_splitter(std::string(a.id));
                return true;
            }
            if (a.kind == ActorKind::Joiner) {
                remove_joiner(std::string(a.id));
                return true;
            }
            if (a.kind == ActorKind::Duplicater) {
                remove_duplicater(std::string(a.id));
                return true;
            }
        }
        for (const auto& a : spec.actors) {
            if (a.kind == ActorKind::Discard) {
                remove_discard(std::string(a.id));
                return true;
            }
        }
        return false;
    }

    void densify_ports() {
        for (const auto& a : spec.actors) {
            auto renumber = [&](std::vector<const Channel*> chans, bool producer_side) {
                int next = 0;
                for (const auto* c : chans) {
                    auto* mc = const_cast<Channel*>(c);
                    (producer_side ? mc->producer.port : mc->consumer.port) = next++;
                }
            };
            renumber(spec.outputs_of(a.id), true);
            renumber(spec.inputs_of(a.id), false);
        }
    }
};

} // namespace

Spec remove_routing_actors(const Spec& spec, std::vector<std::string>* warnings) {
    for (const auto& a : spec.actors)
        if (is_controlled(a.kind) || a.kind == ActorKind::ModeDecider)
            throw desugar_error("actor '" + a.id + "' is controlled; desugar applies to plain "
                                "routed specifications only (use mode substitution first)");
    auto violations = validate_structure(spec);
    if (!violations.empty())
        throw desugar_error("structure invalid: " + violations.front().rule + " on '" +
                            violations.front().element + "'");

    bool any_routing = std::any_of(spec.actors.begin(), spec.actors.end(),
                                   [](const Actor& a) { return is_plain_routing(a.kind); });
    if (!any_routing) return spec;  // identity, bit for bit

    Rewriter rw{spec, {}, 1 << 20};
    while (rw.step()) {
    }
    rw.densify_ports();
    if (!weakly_connected(rw.spec))
        rw.warnings.push_back("result is not weakly connected (dead branches were removed)");
    if (warnings) *warnings = rw.warnings;
    return rw.spec;
}

} // namespace rmdf
