#include "rmdf/exec.hpp"

#include <algorithm>
#include <sstream>

#include "rmdf/analysis.hpp"
#include "rmdf/rate.hpp"

namespace rmdf {

std::map<std::string, std::int64_t> state_signature(const TokenState& state) {
    std::map<std::string, std::int64_t> sig;
    for (const auto& [ch, q] : state.queues) sig["q:" + ch] = static_cast<std::int64_t>(q.size());
    for (const auto& [a, cs] : state.controlled) sig["c:" + a] = cs.has_consumed_ctrl_tkn ? 1 : 0;
    return sig;
}

TokenState initial_state(const Spec& spec) {
    TokenState st;
    for (const auto& c : spec.channels) {
        auto& q = st.queues[c.id];
        std::int64_t whole = c.initial_tokens.floor();
        for (std::int64_t i = 0; i < whole; ++i)
            q.push_back(Token{Token::Kind::Data, "~init:" + c.id, i + 1, {}});
    }
    for (const auto& a : spec.actors) {
        st.job_counters[a.id] = 0;
        if (is_controlled(a.kind)) st.controlled[a.id] = ControlledActorState{};
    }
    return st;
}

DeciderPolicy fixed_port_policy(const Spec& spec, int port) {
    // translate "route to data port `port`" into the parameter assignment
    // the controlled actors will read
    ModeAssignment assignment;
    for (const auto& a : spec.actors) {
        if (a.kind != ActorKind::ControlledSplitter) continue;
        auto outs = spec.data_outputs_of(a.id);
        for (std::size_t i = 0; i < outs.size(); ++i)
            if (outs[i]->production_rate.is_param())
                assignment[outs[i]->production_rate.param] = static_cast<int>(i) == port ? 1 : 0;
    }
    for (const auto& a : spec.actors) {
        if (a.kind != ActorKind::ControlledJoiner) continue;
        auto ins = spec.data_inputs_of(a.id);
        for (std::size_t i = 0; i < ins.size(); ++i)
            if (ins[i]->consumption_rate.is_param())
                assignment[ins[i]->consumption_rate.param] = static_cast<int>(i) == port ? 1 : 0;
    }
    return [assignment](const std::string&, std::int64_t) { return assignment; };
}

DeciderPolicy mode_sequence_policy(std::vector<ModeAssignment> sequence) {
    return [sequence = std::move(sequence)](const std::string& decider,
                                            std::int64_t firing_index) -> ModeAssignment {
        if (firing_index >= static_cast<std::int64_t>(sequence.size()))
            throw exec_error("mode sequence exhausted at firing " + std::to_string(firing_index) +
                             " of decider '" + decider + "'");
        return sequence[static_cast<std::size_t>(firing_index)];
    };
}

Executor::Executor(const Spec& spec, ExecOptions options)
    : spec_(spec), options_(std::move(options)), state_(initial_state(spec)) {
    if (options_.sweep_order.empty()) {
        for (const auto& a : spec_.actors) options_.sweep_order.push_back(a.id);
        std::sort(options_.sweep_order.begin(), options_.sweep_order.end());
    }
}

std::int64_t Executor::need_at(const Channel& c, std::int64_t job) const {
    if (!c.consumption_rate.is_const())
        throw exec_error("parametric consumption rate on '" + c.id +
                         "' outside a controlled joiner");
    return tokens_at_job(job, -c.consumption_rate.value, c.initial_tokens);
}

std::int64_t Executor::produce_at(const Channel& c, std::int64_t job) const {
    if (!c.production_rate.is_const())
        throw exec_error("parametric production rate on '" + c.id +
                         "' outside a controlled splitter");
    return tokens_at_job(job, c.production_rate.value, c.initial_tokens);
}

// Which port the cyclic service order of a plain splitter/joiner uses at
// `job`: ports in ascending index, each holding numerator(rate) consecutive
// slots of the common-denominator cycle. Channel initial-token fractions do
// not influence the order; they are produced by desugaring, not consumed by
// routing.
int Executor::positional_port(const std::vector<const Channel*>& ports, bool production,
                              std::int64_t job) const {
    std::int64_t q = 1;
    for (const auto* c : ports) {
        const RateExpr& r = production ? c->production_rate : c->consumption_rate;
        if (!r.is_const()) throw exec_error("parametric rate on plain routing actor");
        q = lcm64(q, r.value.den());
    }
    std::int64_t slot = (job - 1) % q;  // 0-based slot within the cycle
    std::int64_t offset = 0;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const RateExpr& r = production ? ports[i]->production_rate : ports[i]->consumption_rate;
        std::int64_t count = (r.value * Rational(q)).num();
        if (slot < offset + count) return static_cast<int>(i);
        offset += count;
    }
    throw exec_error("service cycle shorter than expected");
}

int Executor::resolve_selected_port(const Actor& actor, const ModeAssignment& mode) const {
    bool splitter = actor.kind == ActorKind::ControlledSplitter;
    auto ports = splitter ? spec_.data_outputs_of(actor.id) : spec_.data_inputs_of(actor.id);
    if (ports.size() == 1) return 0;  // single surviving branch after substitution
    int selected = -1;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const RateExpr& r = splitter ? ports[i]->production_rate : ports[i]->consumption_rate;
        if (!r.is_param()) continue;
        auto it = mode.find(r.param);
        if (it != mode.end() && it->second == 1) {
            if (selected >= 0)
                throw exec_error("control token selects two ports of '" + actor.id + "'");
            selected = static_cast<int>(i);
        }
    }
    if (selected < 0)
        throw exec_error("control token selects no port of '" + actor.id + "'");
    return selected;
}

void Executor::push(const std::string& actor, std::int64_t job, const Channel& c, Token t) {
    trace_.push_back({movement_counter_++, actor, job, c.id, t, false});
    state_.queues[c.id].push_back(std::move(t));
}

Token Executor::pop(const std::string& actor, std::int64_t job, const Channel& c) {
    auto& q = state_.queues[c.id];
    // an empty pop means eligibility and stepping disagree
    if (q.empty()) throw std::logic_error("negative queue on '" + c.id + "'");
    Token t = q.front();
    q.pop_front();
    trace_.push_back({movement_counter_++, actor, job, c.id, t, true});
    return t;
}

bool Executor::eligible(const std::string& id) const {
    const Actor* a = spec_.find_actor(id);
    if (!a) return false;
    auto queue_len = [&](const Channel* c) -> std::int64_t {
        auto it = state_.queues.find(c->id);
        return it == state_.queues.end() ? 0 : static_cast<std::int64_t>(it->second.size());
    };
    std::int64_t next_job = state_.job_counters.at(id) + 1;

    switch (a->kind) {
        case ActorKind::Splitter:
        case ActorKind::Discard: {
            auto ins = spec_.data_inputs_of(id);
            return !ins.empty() && queue_len(ins[0]) >= 1;
        }
        case ActorKind::Duplicater: {
            // a duplicater forwards data or control alike
            auto ins = spec_.inputs_of(id);
            return !ins.empty() && queue_len(ins[0]) >= 1;
        }
        case ActorKind::Joiner: {
            auto ins = spec_.data_inputs_of(id);
            if (ins.empty()) return false;
            int port = positional_port(ins, false, next_job);
            return queue_len(ins[static_cast<std::size_t>(port)]) >= 1;
        }
        case ActorKind::ModeDecider: {
            auto ins = spec_.data_inputs_of(id);
            return options_.policy && !ins.empty() && queue_len(ins[0]) >= 1;
        }
        case ActorKind::ControlledSplitter:
        case ActorKind::ControlledJoiner: {
            const auto& cs = state_.controlled.at(id);
            if (!cs.has_consumed_ctrl_tkn) {
                auto ctrl = spec_.control_inputs_of(id);
                return !ctrl.empty() && queue_len(ctrl[0]) >= 1;
            }
            if (a->kind == ActorKind::ControlledSplitter) {
                auto ins = spec_.data_inputs_of(id);
                return !ins.empty() && queue_len(ins[0]) >= 1;
            }
            auto ins = spec_.data_inputs_of(id);
            if (options_.eager_controlled_joiners) {
                for (const auto* c : ins)
                    if (queue_len(c) >= 1) return true;
                return false;
            }
            int port = *cs.pending_selection;
            return port < static_cast<int>(ins.size()) &&
                   queue_len(ins[static_cast<std::size_t>(port)]) >= 1;
        }
        case ActorKind::Usual: {
            for (const auto* c : spec_.data_inputs_of(id))
                if (queue_len(c) < need_at(*c, next_job)) return false;
            return true;
        }
    }
    return false;
}

void Executor::step(const std::string& id) {
    if (!eligible(id)) throw exec_error("actor '" + id + "' is not eligible");
    const Actor& a = *spec_.find_actor(id);
    std::int64_t job = state_.job_counters.at(id) + 1;

    switch (a.kind) {
        case ActorKind::Splitter: {
            auto ins = spec_.data_inputs_of(id);
            auto outs = spec_.data_outputs_of(id);
            Token t = pop(id, job, *ins[0]);
            int port = positional_port(outs, true, job);
            push(id, job, *outs[static_cast<std::size_t>(port)], std::move(t));
            state_.job_counters[id] = job;
            break;
        }
        case ActorKind::Joiner: {
            auto ins = spec_.data_inputs_of(id);
            auto outs = spec_.data_outputs_of(id);
            int port = positional_port(ins, false, job);
            Token t = pop(id, job, *ins[static_cast<std::size_t>(port)]);
            push(id, job, *outs[0], std::move(t));
            state_.job_counters[id] = job;
            break;
        }
        case ActorKind::Duplicater: {
            auto ins = spec_.inputs_of(id);
            Token t = pop(id, job, *ins[0]);
            for (const auto* c : spec_.outputs_of(id)) push(id, job, *c, t);
            state_.job_counters[id] = job;
            break;
        }
        case ActorKind::Discard: {
            auto ins = spec_.data_inputs_of(id);
            pop(id, job, *ins[0]);
            state_.job_counters[id] = job;
            break;
        }
        case ActorKind::ModeDecider: {
            auto ins = spec_.data_inputs_of(id);
            auto outs = spec_.control_outputs_of(id);
            pop(id, job, *ins[0]);
            ModeAssignment mode = options_.policy(id, decider_firings_[id]++);
            Token ctrl{Token::Kind::Control, id, job, std::move(mode)};
            if (!outs.empty()) push(id, job, *outs[0], std::move(ctrl));
            state_.job_counters[id] = job;
            break;
        }
        case ActorKind::ControlledSplitter:
        case ActorKind::ControlledJoiner: {
            auto& cs = state_.controlled.at(id);
            if (!cs.has_consumed_ctrl_tkn) {
                auto ctrl = spec_.control_inputs_of(id);
                Token t = pop(id, job, *ctrl[0]);
                cs.pending_mode = t.mode;
                cs.pending_selection = resolve_selected_port(a, t.mode);
                cs.has_consumed_ctrl_tkn = true;
                break;  // job completes with the data phase
            }
            if (a.kind == ActorKind::ControlledSplitter) {
                auto ins = spec_.data_inputs_of(id);
                auto outs = spec_.data_outputs_of(id);
                Token t = pop(id, job, *ins[0]);
                push(id, job, *outs[static_cast<std::size_t>(*cs.pending_selection)], std::move(t));
            } else {
                auto ins = spec_.data_inputs_of(id);
                auto outs = spec_.data_outputs_of(id);
                int port = *cs.pending_selection;
                if (options_.eager_controlled_joiners) {
                    for (std::size_t i = 0; i < ins.size(); ++i) {
                        auto it = state_.queues.find(ins[i]->id);
                        if (it != state_.queues.end() && !it->second.empty()) {
                            port = static_cast<int>(i);
                            break;
                        }
                    }
                }
                Token t = pop(id, job, *ins[static_cast<std::size_t>(port)]);
                push(id, job, *outs[0], std::move(t));
            }
            cs.has_consumed_ctrl_tkn = false;
            cs.pending_selection.reset();
            state_.job_counters[id] = job;
            break;
        }
        case ActorKind::Usual: {
            for (const auto* c : spec_.data_inputs_of(id)) {
                std::int64_t need = need_at(*c, job);
                for (std::int64_t i = 0; i < need; ++i) pop(id, job, *c);
            }
            for (const auto* c : spec_.data_outputs_of(id)) {
                std::int64_t count = produce_at(*c, job);
                for (std::int64_t i = 0; i < count; ++i)
                    push(id, job, *c, Token{Token::Kind::Data, id, job, {}});
            }
            state_.job_counters[id] = job;
            break;
        }
    }
}

bool Executor::run_to_targets(const std::map<std::string, std::int64_t>& targets) {
    auto done = [&]() {
        for (const auto& [actor, n] : targets)
            if (state_.job_counters.at(actor) < n) return false;
        return true;
    };
    bool progress = true;
    while (progress && !done()) {
        progress = false;
        for (const auto& id : options_.sweep_order) {
            auto it = targets.find(id);
            bool capped = it != targets.end() && state_.job_counters.at(id) >= it->second;
            if (capped) continue;
            // fire both phases of a controlled actor within one visit when
            // possible; other actors fire once
            if (eligible(id)) {
                step(id);
                progress = true;
            }
            if (state_.controlled.count(id) && state_.controlled.at(id).has_consumed_ctrl_tkn &&
                eligible(id)) {
                step(id);
                progress = true;
            }
        }
    }
    return done();
}

void Executor::run_offline_fixpoint(std::int64_t step_budget) {
    std::int64_t fired = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& id : options_.sweep_order) {
            const Actor* a = spec_.find_actor(id);
            if (a->is_timed()) continue;  // runtime jobs only
            if (a->kind == ActorKind::ModeDecider && !options_.policy) {
                auto ins = spec_.data_inputs_of(id);
                bool has_token = !ins.empty() && !state_.queues[ins[0]->id].empty();
                if (has_token)
                    throw exec_error("mode decider '" + id +
                                     "' is eligible offline but no decider policy was supplied");
                continue;
            }
            while (eligible(id)) {
                step(id);
                progress = true;
                if (++fired > step_budget)
                    throw exec_error("offline execution exceeded its step budget (" +
                                     std::to_string(step_budget) +
                                     "); the specification likely diverges");
            }
        }
    }
}

std::string Executor::describe_stuck(const std::map<std::string, std::int64_t>& targets) const {
    std::ostringstream out;
    out << "deadlock:";
    for (const auto& [actor, n] : targets) {
        std::int64_t have = state_.job_counters.at(actor);
        if (have < n) out << " " << actor << "=" << have << "/" << n;
    }
    out << "; queues:";
    for (const auto& [ch, q] : state_.queues)
        if (!q.empty()) out << " " << ch << "=" << q.size();
    return out.str();
}

RunResult run_to_completion(const Spec& spec, const std::map<std::string, std::int64_t>& targets,
                            ExecOptions options) {
    Executor ex(spec, std::move(options));
    RunResult res;
    res.completed = ex.run_to_targets(targets);
    if (!res.completed) res.diagnosis = ex.describe_stuck(targets);
    res.final_state = ex.state();
    res.trace = ex.trace();
    return res;
}

PreprocessResult preprocess(const Spec& spec, DeciderPolicy policy, std::int64_t step_budget) {
    if (step_budget <= 0) {
        auto verdict = consistency(with_all_params_one(spec));
        if (!verdict.consistent)
            throw exec_error("cannot derive an offline step budget: the specification is "
                             "inconsistent; pass an explicit budget");
        step_budget = 0;
        for (const auto& [actor, n] : verdict.repetition.counts) {
            (void)actor;
            step_budget += n;
        }
        step_budget *= 10;
    }
    ExecOptions opts;
    opts.policy = std::move(policy);
    Executor ex(spec, std::move(opts));
    ex.run_offline_fixpoint(step_budget);

    PreprocessResult res;
    res.state = ex.state();
    res.offline_jobs = ex.state().job_counters;
    for (auto it = res.offline_jobs.begin(); it != res.offline_jobs.end();) {
        res.total_offline += it->second;
        if (it->second == 0)
            it = res.offline_jobs.erase(it);
        else
            ++it;
    }
    res.spec = spec;
    for (auto& c : res.spec.channels) {
        std::int64_t len = static_cast<std::int64_t>(res.state.queues[c.id].size());
        c.initial_tokens = Rational(len) + c.initial_tokens.frac();
    }
    return res;
}

McpReport check_mcp_properties(const Spec& spec, const std::vector<Trace>& traces,
                               const std::vector<ControlArea>& areas) {
    McpReport report;
    if (traces.empty() || areas.empty()) return report;

    // branch channel -> branch ordinal, per controlled splitter
    std::map<std::string, std::map<std::string, int>> splitter_branch;
    std::map<std::string, std::string> splitter_ctrl_channel;
    std::map<std::string, std::string> joiner_ctrl_channel;
    std::map<std::string, std::vector<std::string>> joiner_ports;
    for (const auto& area : areas) {
        for (const auto& cs : area.controlled_splitters) {
            auto outs = spec.data_outputs_of(cs);
            for (std::size_t i = 0; i < outs.size(); ++i)
                splitter_branch[cs][outs[i]->id] = static_cast<int>(i);
            auto ctrl = spec.control_inputs_of(cs);
            if (!ctrl.empty()) splitter_ctrl_channel[cs] = ctrl[0]->id;
        }
        for (const auto& cj : area.controlled_joiners) {
            auto ctrl = spec.control_inputs_of(cj);
            if (!ctrl.empty()) joiner_ctrl_channel[cj] = ctrl[0]->id;
            for (const auto* c : spec.data_inputs_of(cj))
                joiner_ports[cj].push_back(c->id);
        }
    }

    for (const auto& trace : traces) {
        // (a) non-overlapping: one branch per control token at each splitter
        for (const auto& [cs, branches] : splitter_branch) {
            int current_branch = -1;
            bool saw_ctrl = false;
            for (const auto& ev : trace) {
                if (ev.actor != cs) continue;
                if (ev.consumed && ev.channel == splitter_ctrl_channel[cs]) {
                    saw_ctrl = true;
                    current_branch = -1;
                    continue;
                }
                auto it = branches.find(ev.channel);
                if (it == branches.end() || ev.consumed) continue;
                if (!saw_ctrl) {
                    report.non_overlapping = false;
                    report.notes.push_back("splitter '" + cs + "' routed data before any control token");
                } else if (current_branch == -1) {
                    current_branch = it->second;
                } else if (current_branch != it->second) {
                    report.non_overlapping = false;
                    report.notes.push_back("splitter '" + cs +
                                           "' routed tokens into two branches between control tokens");
                }
            }
        }

        // (c) late retirement: joiner consumes exactly from the port its
        // control token selected, so an old branch finishes before a newer
        // one is drained
        for (const auto& [cj, ports] : joiner_ports) {
            std::vector<int> decisions;   // selected port per consumed control token
            std::size_t data_moves = 0;
            for (const auto& ev : trace) {
                if (ev.actor != cj || !ev.consumed) continue;
                if (ev.channel == joiner_ctrl_channel[cj]) {
                    int port = -1;
                    auto ins = spec.data_inputs_of(cj);
                    if (ins.size() == 1) {
                        port = 0;
                    } else {
                        for (std::size_t i = 0; i < ins.size(); ++i) {
                            const RateExpr& r = ins[i]->consumption_rate;
                            if (r.is_param()) {
                                auto it = ev.token.mode.find(r.param);
                                if (it != ev.token.mode.end() && it->second == 1)
                                    port = static_cast<int>(i);
                            }
                        }
                    }
                    decisions.push_back(port);
                    continue;
                }
                auto it = std::find(ports.begin(), ports.end(), ev.channel);
                if (it == ports.end()) continue;
                int actual = static_cast<int>(it - ports.begin());
                if (data_moves >= decisions.size() || decisions[data_moves] != actual) {
                    report.late_retirement = false;
                    report.notes.push_back("joiner '" + cj + "' released a token from port " +
                                           std::to_string(actual) +
                                           " ahead of the branch its control token selected");
                }
                ++data_moves;
            }
        }
    }

    // (b) periodic: actors outside every area fire identically across traces
    std::set<std::string> inside;
    for (const auto& area : areas) {
        inside.insert(area.members.begin(), area.members.end());
        inside.insert(area.decider);
        inside.insert(area.duplicaters.begin(), area.duplicaters.end());
        inside.insert(area.controlled_splitters.begin(), area.controlled_splitters.end());
        inside.insert(area.controlled_joiners.begin(), area.controlled_joiners.end());
    }
    std::vector<std::map<std::string, std::int64_t>> counts(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (const auto& ev : traces[i])
            if (!inside.count(ev.actor))
                counts[i][ev.actor] = std::max(counts[i][ev.actor], ev.job);
    }
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] != counts[0]) {
            report.periodic = false;
            report.notes.push_back("firing counts outside the control areas differ between traces");
            break;
        }
    }
    return report;
}

} // namespace rmdf
