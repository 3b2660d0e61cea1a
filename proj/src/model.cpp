#include "rmdf/model.hpp"

#include <algorithm>

namespace rmdf {

const char* kind_name(ActorKind k) {
    switch (k) {
        case ActorKind::Usual: return "usual";
        case ActorKind::Splitter: return "splitter";
        case ActorKind::Joiner: return "joiner";
        case ActorKind::Duplicater: return "duplicater";
        case ActorKind::Discard: return "discard";
        case ActorKind::ControlledSplitter: return "controlled_splitter";
        case ActorKind::ControlledJoiner: return "controlled_joiner";
        case ActorKind::ModeDecider: return "mode_decider";
    }
    return "usual";
}

ActorKind kind_from_name(const std::string& name) {
    if (name == "usual") return ActorKind::Usual;
    if (name == "splitter") return ActorKind::Splitter;
    if (name == "joiner") return ActorKind::Joiner;
    if (name == "duplicater") return ActorKind::Duplicater;
    if (name == "discard") return ActorKind::Discard;
    if (name == "controlled_splitter") return ActorKind::ControlledSplitter;
    if (name == "controlled_joiner") return ActorKind::ControlledJoiner;
    if (name == "mode_decider") return ActorKind::ModeDecider;
    throw model_error("unknown actor kind '" + name + "'");
}

bool is_plain_routing(ActorKind k) {
    return k == ActorKind::Splitter || k == ActorKind::Joiner ||
           k == ActorKind::Duplicater || k == ActorKind::Discard;
}

bool is_controlled(ActorKind k) {
    return k == ActorKind::ControlledSplitter || k == ActorKind::ControlledJoiner;
}

bool is_routing(ActorKind k) {
    return is_plain_routing(k) || is_controlled(k) || k == ActorKind::ModeDecider;
}

const Actor* Spec::find_actor(const std::string& id) const {
    for (const auto& a : actors)
        if (a.id == id) return &a;
    return nullptr;
}

Actor* Spec::find_actor(const std::string& id) {
    for (auto& a : actors)
        if (a.id == id) return &a;
    return nullptr;
}

const Channel* Spec::find_channel(const std::string& id) const {
    for (const auto& c : channels)
        if (c.id == id) return &c;
    return nullptr;
}

namespace {

std::vector<const Channel*> sorted_by_port(std::vector<const Channel*> v, bool producer_side) {
    std::sort(v.begin(), v.end(), [&](const Channel* a, const Channel* b) {
        int pa = producer_side ? a->producer.port : a->consumer.port;
        int pb = producer_side ? b->producer.port : b->consumer.port;
        return pa < pb;
    });
    return v;
}

} // namespace

std::vector<const Channel*> Spec::inputs_of(const std::string& actor) const {
    std::vector<const Channel*> v;
    for (const auto& c : channels)
        if (c.consumer.actor == actor) v.push_back(&c);
    return sorted_by_port(std::move(v), false);
}

std::vector<const Channel*> Spec::outputs_of(const std::string& actor) const {
    std::vector<const Channel*> v;
    for (const auto& c : channels)
        if (c.producer.actor == actor) v.push_back(&c);
    return sorted_by_port(std::move(v), true);
}

std::vector<const Channel*> Spec::data_inputs_of(const std::string& actor) const {
    std::vector<const Channel*> v;
    for (const auto* c : inputs_of(actor))
        if (!c->is_control) v.push_back(c);
    return v;
}

std::vector<const Channel*> Spec::data_outputs_of(const std::string& actor) const {
    std::vector<const Channel*> v;
    for (const auto* c : outputs_of(actor))
        if (!c->is_control) v.push_back(c);
    return v;
}

std::vector<const Channel*> Spec::control_inputs_of(const std::string& actor) const {
    std::vector<const Channel*> v;
    for (const auto* c : inputs_of(actor))
        if (c->is_control) v.push_back(c);
    return v;
}

std::vector<const Channel*> Spec::control_outputs_of(const std::string& actor) const {
    std::vector<const Channel*> v;
    for (const auto* c : outputs_of(actor))
        if (c->is_control) v.push_back(c);
    return v;
}

bool Spec::has_param_rates() const {
    for (const auto& c : channels)
        if (c.production_rate.is_param() || c.consumption_rate.is_param()) return true;
    return false;
}

std::vector<std::string> Spec::referenced_params() const {
    std::vector<std::string> out;
    auto add = [&](const RateExpr& r) {
        if (r.is_param() && std::find(out.begin(), out.end(), r.param) == out.end())
            out.push_back(r.param);
    };
    for (const auto& c : channels) {
        add(c.production_rate);
        add(c.consumption_rate);
    }
    return out;
}

namespace {

bool timing_equal(const std::optional<Timing>& a, const std::optional<Timing>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->frequency_hz == b->frequency_hz && a->phase_ms == b->phase_ms;
}

bool exec_equal(const std::optional<ExecTime>& a, const std::optional<ExecTime>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->bcet_ms == b->bcet_ms && a->wcet_ms == b->wcet_ms;
}

} // namespace

bool structurally_equal(const Spec& a, const Spec& b) {
    if (a.name != b.name) return false;
    if (a.actors.size() != b.actors.size() || a.channels.size() != b.channels.size()) return false;
    for (const auto& av : a.actors) {
        const Actor* bv = b.find_actor(av.id);
        if (!bv || bv->kind != av.kind) return false;
        if (!timing_equal(av.timing, bv->timing)) return false;
        if (!exec_equal(av.exec_time, bv->exec_time)) return false;
    }
    for (const auto& ac : a.channels) {
        const Channel* bc = b.find_channel(ac.id);
        if (!bc) return false;
        if (!(ac.producer == bc->producer) || !(ac.consumer == bc->consumer)) return false;
        if (!(ac.production_rate == bc->production_rate)) return false;
        if (!(ac.consumption_rate == bc->consumption_rate)) return false;
        if (ac.initial_tokens != bc->initial_tokens || ac.is_control != bc->is_control) return false;
    }
    if (a.mode_table.parameters != b.mode_table.parameters) return false;
    if (a.mode_table.modes != b.mode_table.modes) return false;
    return true;
}

Spec with_all_params_one(const Spec& spec) {
    Spec out = spec;
    for (auto& c : out.channels) {
        if (c.production_rate.is_param()) c.production_rate = RateExpr::constant(Rational(1));
        if (c.consumption_rate.is_param()) c.consumption_rate = RateExpr::constant(Rational(1));
    }
    out.mode_table = ModeTable{};
    return out;
}

} // namespace rmdf
