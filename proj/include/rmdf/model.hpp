#ifndef RMDF_MODEL_HPP
#define RMDF_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmdf/rational.hpp"

namespace rmdf {

struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ActorKind {
    Usual,
    Splitter,
    Joiner,
    Duplicater,
    Discard,
    ControlledSplitter,
    ControlledJoiner,
    ModeDecider,
};

const char* kind_name(ActorKind k);
ActorKind kind_from_name(const std::string& name);

bool is_plain_routing(ActorKind k);   // splitter/joiner/duplicater/discard
bool is_controlled(ActorKind k);      // controlled splitter/joiner
bool is_routing(ActorKind k);         // any of the above plus mode decider

// A rate is either an exact nonzero rational constant or a named 0/1
// parameter. Parameters appear only on controlled-splitter outputs and
// controlled-joiner inputs.
struct RateExpr {
    enum class Kind { Const, Param } kind = Kind::Const;
    Rational value = Rational(1);
    std::string param;

    static RateExpr constant(Rational v) { return RateExpr{Kind::Const, v, {}}; }
    static RateExpr parameter(std::string name) { return RateExpr{Kind::Param, Rational(0), std::move(name)}; }

    bool is_param() const { return kind == Kind::Param; }
    bool is_const() const { return kind == Kind::Const; }

    bool operator==(const RateExpr& o) const {
        return kind == o.kind && (is_param() ? param == o.param : value == o.value);
    }
    std::string str() const { return is_param() ? param : value.str(); }
};

struct Timing {
    Rational frequency_hz;  // > 0
    Rational phase_ms = Rational(0);

    Rational period_ms() const { return Rational(1000) / frequency_hz; }
};

struct ExecTime {
    Rational bcet_ms;
    Rational wcet_ms;
};

struct Actor {
    std::string id;
    ActorKind kind = ActorKind::Usual;
    std::optional<Timing> timing;
    std::optional<ExecTime> exec_time;

    bool is_timed() const { return timing.has_value(); }
};

struct PortRef {
    std::string actor;
    int port = 0;

    bool operator==(const PortRef& o) const { return actor == o.actor && port == o.port; }
};

struct Channel {
    std::string id;
    PortRef producer;
    PortRef consumer;
    RateExpr production_rate;
    RateExpr consumption_rate;
    Rational initial_tokens;  // >= 0, may be fractional
    bool is_control = false;
};

// One execution mode: a total assignment parameter -> {0, 1}.
using ModeAssignment = std::map<std::string, int>;

struct ModeTable {
    std::vector<std::string> parameters;  // declaration order
    std::vector<ModeAssignment> modes;

    bool empty() const { return modes.empty(); }
};

// Immutable once constructed; any number of analyses may read one Spec
// concurrently.
struct Spec {
    std::string name;
    std::vector<Actor> actors;
    std::vector<Channel> channels;
    ModeTable mode_table;

    const Actor* find_actor(const std::string& id) const;
    const Channel* find_channel(const std::string& id) const;
    Actor* find_actor(const std::string& id);

    std::vector<const Channel*> inputs_of(const std::string& actor) const;
    std::vector<const Channel*> outputs_of(const std::string& actor) const;
    // Inputs/outputs filtered on the control flag, ordered by port index.
    std::vector<const Channel*> data_inputs_of(const std::string& actor) const;
    std::vector<const Channel*> data_outputs_of(const std::string& actor) const;
    std::vector<const Channel*> control_inputs_of(const std::string& actor) const;
    std::vector<const Channel*> control_outputs_of(const std::string& actor) const;

    bool has_param_rates() const;
    // All parameter names referenced by channel rates, in declaration order.
    std::vector<std::string> referenced_params() const;
};

bool structurally_equal(const Spec& a, const Spec& b);

// Copy of the spec with every parametric rate set to the constant 1.
// Used by the conservative timing analysis.
Spec with_all_params_one(const Spec& spec);

} // namespace rmdf

#endif
