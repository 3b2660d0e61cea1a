#include "rmdf/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rmdf {

using json = nlohmann::ordered_json;

namespace {

Rational parse_rational_field(const json& v, const std::string& path) {
    if (!v.is_string())
        throw parse_error(path, "expected a rational string \"p/q\"");
    try {
        return Rational::parse(v.get<std::string>());
    } catch (const rational_error& e) {
        throw parse_error(path, e.what());
    }
}

RateExpr parse_rate_field(const json& v, const std::string& path) {
    if (v.is_object()) {
        if (!v.contains("param") || !v["param"].is_string())
            throw parse_error(path, "rate object must be {\"param\": name}");
        return RateExpr::parameter(v["param"].get<std::string>());
    }
    Rational r = parse_rational_field(v, path);
    if (r.is_zero())
        throw parse_error(path, "rate must be nonzero");
    return RateExpr::constant(r);
}

json rate_to_json(const RateExpr& r) {
    if (r.is_param()) return json{{"param", r.param}};
    return json(r.value.str());
}

} // namespace

Spec parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error("document", e.what());
    }
    if (!doc.is_object()) throw parse_error("document", "top level must be an object");

    Spec spec;
    spec.name = doc.value("name", std::string("unnamed"));

    std::set<std::string> actor_ids;
    if (!doc.contains("actors") || !doc["actors"].is_array())
        throw parse_error("actors", "missing actor list");
    std::size_t idx = 0;
    for (const auto& a : doc["actors"]) {
        std::string path = "actors[" + std::to_string(idx++) + "]";
        Actor actor;
        if (!a.contains("id") || !a["id"].is_string())
            throw parse_error(path, "actor needs a string id");
        actor.id = a["id"].get<std::string>();
        if (!actor_ids.insert(actor.id).second)
            throw parse_error(path, "duplicate actor id '" + actor.id + "'");
        try {
            actor.kind = kind_from_name(a.value("kind", std::string("usual")));
        } catch (const model_error& e) {
            throw parse_error(path + "/kind", e.what());
        }
        if (a.contains("frequency_hz")) {
            Timing t;
            t.frequency_hz = parse_rational_field(a["frequency_hz"], path + "/frequency_hz");
            if (a.contains("phase_ms"))
                t.phase_ms = parse_rational_field(a["phase_ms"], path + "/phase_ms");
            actor.timing = t;
        } else if (a.contains("phase_ms")) {
            throw parse_error(path + "/phase_ms", "phase given without a frequency");
        }
        if (a.contains("bcet_ms") || a.contains("wcet_ms")) {
            if (!a.contains("bcet_ms") || !a.contains("wcet_ms"))
                throw parse_error(path, "bcet_ms and wcet_ms must be given together");
            ExecTime e;
            e.bcet_ms = parse_rational_field(a["bcet_ms"], path + "/bcet_ms");
            e.wcet_ms = parse_rational_field(a["wcet_ms"], path + "/wcet_ms");
            actor.exec_time = e;
        }
        spec.actors.push_back(std::move(actor));
    }

    std::set<std::string> channel_ids;
    if (!doc.contains("channels") || !doc["channels"].is_array())
        throw parse_error("channels", "missing channel list");
    idx = 0;
    for (const auto& c : doc["channels"]) {
        std::string path = "channels[" + std::to_string(idx++) + "]";
        Channel ch;
        if (!c.contains("id") || !c["id"].is_string())
            throw parse_error(path, "channel needs a string id");
        ch.id = c["id"].get<std::string>();
        if (!channel_ids.insert(ch.id).second)
            throw parse_error(path, "duplicate channel id '" + ch.id + "'");
        auto endpoint = [&](const char* key) -> PortRef {
            if (!c.contains(key) || !c[key].is_array() || c[key].size() != 2 ||
                !c[key][0].is_string() || !c[key][1].is_number_integer())
                throw parse_error(path + "/" + key, "expected [actor id, port index]");
            PortRef p;
            p.actor = c[key][0].get<std::string>();
            p.port = c[key][1].get<int>();
            if (!actor_ids.count(p.actor))
                throw parse_error(path + "/" + key, "unknown actor '" + p.actor + "'");
            if (p.port < 0)
                throw parse_error(path + "/" + key, "negative port index");
            return p;
        };
        ch.producer = endpoint("from");
        ch.consumer = endpoint("to");
        if (!c.contains("prod")) throw parse_error(path, "missing prod rate");
        if (!c.contains("cons")) throw parse_error(path, "missing cons rate");
        ch.production_rate = parse_rate_field(c["prod"], path + "/prod");
        ch.consumption_rate = parse_rate_field(c["cons"], path + "/cons");
        if (c.contains("init"))
            ch.initial_tokens = parse_rational_field(c["init"], path + "/init");
        if (ch.initial_tokens.is_negative())
            throw parse_error(path + "/init", "initial tokens must be >= 0");
        ch.is_control = c.value("control", false);
        spec.channels.push_back(std::move(ch));
    }

    if (doc.contains("modes")) {
        if (!doc["modes"].is_array()) throw parse_error("modes", "expected a list of assignments");
        // declaration order of parameters: first the channel rates, then
        // anything new appearing in mode rows
        spec.mode_table.parameters = spec.referenced_params();
        idx = 0;
        for (const auto& m : doc["modes"]) {
            std::string path = "modes[" + std::to_string(idx++) + "]";
            if (!m.is_object()) throw parse_error(path, "mode must be an object");
            ModeAssignment row;
            for (auto it = m.begin(); it != m.end(); ++it) {
                if (!it.value().is_number_integer() ||
                    (it.value().get<int>() != 0 && it.value().get<int>() != 1))
                    throw parse_error(path + "/" + it.key(), "parameter value must be 0 or 1");
                row[it.key()] = it.value().get<int>();
                auto& params = spec.mode_table.parameters;
                if (std::find(params.begin(), params.end(), it.key()) == params.end())
                    params.push_back(it.key());
            }
            spec.mode_table.modes.push_back(std::move(row));
        }
    } else {
        spec.mode_table.parameters = spec.referenced_params();
    }
    return spec;
}

std::string serialize_spec(const Spec& spec) {
    json doc;
    doc["name"] = spec.name;
    doc["actors"] = json::array();
    for (const auto& a : spec.actors) {
        json ja;
        ja["id"] = a.id;
        ja["kind"] = kind_name(a.kind);
        if (a.timing) {
            ja["frequency_hz"] = a.timing->frequency_hz.str();
            if (!a.timing->phase_ms.is_zero()) ja["phase_ms"] = a.timing->phase_ms.str();
        }
        if (a.exec_time) {
            ja["bcet_ms"] = a.exec_time->bcet_ms.str();
            ja["wcet_ms"] = a.exec_time->wcet_ms.str();
        }
        doc["actors"].push_back(std::move(ja));
    }
    doc["channels"] = json::array();
    for (const auto& c : spec.channels) {
        json jc;
        jc["id"] = c.id;
        jc["from"] = json::array({c.producer.actor, c.producer.port});
        jc["to"] = json::array({c.consumer.actor, c.consumer.port});
        jc["prod"] = rate_to_json(c.production_rate);
        jc["cons"] = rate_to_json(c.consumption_rate);
        if (!c.initial_tokens.is_zero()) jc["init"] = c.initial_tokens.str();
        if (c.is_control) jc["control"] = true;
        doc["channels"].push_back(std::move(jc));
    }
    if (!spec.mode_table.modes.empty()) {
        doc["modes"] = json::array();
        for (const auto& m : spec.mode_table.modes) {
            json jm;
            // keep declaration order of parameters
            for (const auto& p : spec.mode_table.parameters) {
                auto it = m.find(p);
                if (it != m.end()) jm[p] = it->second;
            }
            for (const auto& [k, v] : m)
                if (!jm.contains(k)) jm[k] = v;
            doc["modes"].push_back(std::move(jm));
        }
    }
    return doc.dump(2) + "\n";
}

Spec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

void write_spec_file(const Spec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error(path, "cannot open file for writing");
    out << serialize_spec(spec);
}

} // namespace rmdf
