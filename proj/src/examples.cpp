#include "rmdf/examples.hpp"

#include <algorithm>

namespace rmdf {

namespace {

struct Builder {
    Spec spec;

    explicit Builder(std::string name) { spec.name = std::move(name); }

    Builder& actor(std::string id, ActorKind kind = ActorKind::Usual) {
        Actor a;
        a.id = std::move(id);
        a.kind = kind;
        spec.actors.push_back(std::move(a));
        return *this;
    }

    Builder& timed(const std::string& id, Rational freq_hz, Rational phase_ms = Rational(0)) {
        spec.find_actor(id)->timing = Timing{freq_hz, phase_ms};
        return *this;
    }

    Builder& cost(const std::string& id, Rational bcet, Rational wcet) {
        spec.find_actor(id)->exec_time = ExecTime{bcet, wcet};
        return *this;
    }

    Builder& channel(std::string id, std::string from, int from_port, std::string to, int to_port,
                     RateExpr prod, RateExpr cons, Rational init = Rational(0),
                     bool control = false) {
        Channel c;
        c.id = std::move(id);
        c.producer = {std::move(from), from_port};
        c.consumer = {std::move(to), to_port};
        c.production_rate = std::move(prod);
        c.consumption_rate = std::move(cons);
        c.initial_tokens = std::move(init);
        c.is_control = control;
        spec.channels.push_back(std::move(c));
        return *this;
    }

    Builder& modes(std::vector<ModeAssignment> rows) {
        spec.mode_table.modes = std::move(rows);
        spec.mode_table.parameters = spec.referenced_params();
        return *this;
    }
};

RateExpr one() { return RateExpr::constant(Rational(1)); }
RateExpr rate(std::int64_t p, std::int64_t q) { return RateExpr::constant(Rational(p, q)); }
RateExpr param(const char* name) { return RateExpr::parameter(name); }

Spec splitter_example(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("SPL", ActorKind::Splitter).actor("B").actor("C");
    b.channel("a_spl", "A", 0, "SPL", 0, one(), one());
    b.channel("c1", "SPL", 0, "B", 0, rate(2, 3), one());
    b.channel("c2", "SPL", 1, "C", 0, rate(1, 3), one());
    return b.spec;
}

Spec splitter_plain(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("B").actor("C");
    b.channel("c1", "A", 0, "B", 0, rate(2, 3), one(), Rational(2, 3));
    b.channel("c2", "A", 1, "C", 0, rate(1, 3), one());
    return b.spec;
}

Spec joiner_example(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("B").actor("JOIN", ActorKind::Joiner).actor("C");
    b.channel("c1", "A", 0, "JOIN", 0, one(), rate(2, 3));
    b.channel("c2", "B", 0, "JOIN", 1, one(), rate(1, 3));
    b.channel("out", "JOIN", 0, "C", 0, one(), one());
    return b.spec;
}

Spec joiner_plain(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("B").actor("C");
    b.channel("c1", "A", 0, "C", 0, one(), rate(2, 3));
    b.channel("c2", "B", 0, "C", 1, one(), rate(1, 3), Rational(2, 3));
    return b.spec;
}

Spec duplicater_example(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("DUP", ActorKind::Duplicater).actor("B").actor("C");
    b.channel("in", "A", 0, "DUP", 0, one(), one());
    b.channel("c1", "DUP", 0, "B", 0, one(), one());
    b.channel("c2", "DUP", 1, "C", 0, one(), one());
    return b.spec;
}

Spec duplicater_plain(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("B").actor("C");
    b.channel("c1", "A", 0, "B", 0, one(), one());
    b.channel("c2", "A", 1, "C", 0, one(), one());
    return b.spec;
}

Spec discard_example(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("SPL", ActorKind::Splitter).actor("B").actor("DIS", ActorKind::Discard);
    b.channel("a_spl", "A", 0, "SPL", 0, one(), one());
    b.channel("c1", "SPL", 0, "B", 0, rate(2, 3), one());
    b.channel("c2", "SPL", 1, "DIS", 0, rate(1, 3), one());
    return b.spec;
}

Spec discard_plain(const std::string& name) {
    Builder b(name);
    b.actor("A").actor("B");
    b.channel("c1", "A", 0, "B", 0, rate(2, 3), one(), Rational(2, 3));
    return b.spec;
}

// The three-branch running example: mode decider B conditions branches
// C1-C2, D1 and E1 between a controlled splitter and a controlled joiner.
Spec three_branch_example(const std::string& name) {
    Builder b(name);
    b.actor("A").timed("A", Rational(100));
    b.actor("Dup1", ActorKind::Duplicater);
    b.actor("B", ActorKind::ModeDecider);
    b.actor("Dup2", ActorKind::Duplicater);
    b.actor("CS", ActorKind::ControlledSplitter);
    b.actor("C1").actor("C2").actor("D1").actor("E1");
    b.actor("CJ", ActorKind::ControlledJoiner);
    b.actor("F").timed("F", Rational(100));
    b.channel("a_dup", "A", 0, "Dup1", 0, one(), one());
    b.channel("dup_cs", "Dup1", 0, "CS", 0, one(), one());
    b.channel("dup_b", "Dup1", 1, "B", 0, one(), one());
    b.channel("b_dup2", "B", 0, "Dup2", 0, one(), one(), Rational(0), true);
    b.channel("dup2_cs", "Dup2", 0, "CS", 1, one(), one(), Rational(0), true);
    b.channel("dup2_cj", "Dup2", 1, "CJ", 3, one(), one(), Rational(0), true);
    b.channel("cs_c1", "CS", 0, "C1", 0, param("m1"), one());
    b.channel("cs_d1", "CS", 1, "D1", 0, param("m2"), one());
    b.channel("cs_e1", "CS", 2, "E1", 0, param("m3"), one());
    b.channel("c1_c2", "C1", 0, "C2", 0, one(), one());
    b.channel("c2_cj", "C2", 0, "CJ", 0, one(), param("m1"));
    b.channel("d1_cj", "D1", 0, "CJ", 1, one(), param("m2"));
    b.channel("e1_cj", "E1", 0, "CJ", 2, one(), param("m3"));
    b.channel("cj_f", "CJ", 0, "F", 0, one(), one());
    b.modes({{{"m1", 1}, {"m2", 0}, {"m3", 0}},
             {{"m1", 0}, {"m2", 1}, {"m3", 0}},
             {{"m1", 0}, {"m2", 0}, {"m3", 1}}});
    return b.spec;
}

// One actor per branch, with clashing frequencies inside the control area.
Spec three_branch_frequencies(const std::string& name) {
    Builder b(name);
    b.actor("A").timed("A", Rational(100));
    b.actor("Dup1", ActorKind::Duplicater);
    b.actor("B", ActorKind::ModeDecider);
    b.actor("Dup2", ActorKind::Duplicater);
    b.actor("CS", ActorKind::ControlledSplitter);
    b.actor("C").timed("C", Rational(25));
    b.actor("D").timed("D", Rational(50));
    b.actor("E").timed("E", Rational(100));
    b.actor("CJ", ActorKind::ControlledJoiner);
    b.actor("F").timed("F", Rational(100));
    b.channel("a_dup", "A", 0, "Dup1", 0, one(), one());
    b.channel("dup_cs", "Dup1", 0, "CS", 0, one(), one());
    b.channel("dup_b", "Dup1", 1, "B", 0, one(), one());
    b.channel("b_dup2", "B", 0, "Dup2", 0, one(), one(), Rational(0), true);
    b.channel("dup2_cs", "Dup2", 0, "CS", 1, one(), one(), Rational(0), true);
    b.channel("dup2_cj", "Dup2", 1, "CJ", 3, one(), one(), Rational(0), true);
    b.channel("cs_c", "CS", 0, "C", 0, param("m1"), one());
    b.channel("cs_d", "CS", 1, "D", 0, param("m2"), one());
    b.channel("cs_e", "CS", 2, "E", 0, param("m3"), one());
    b.channel("c_cj", "C", 0, "CJ", 0, one(), param("m1"));
    b.channel("d_cj", "D", 0, "CJ", 1, one(), param("m2"));
    b.channel("e_cj", "E", 0, "CJ", 2, one(), param("m3"));
    b.channel("cj_f", "CJ", 0, "F", 0, one(), one());
    b.modes({{{"m1", 1}, {"m2", 0}, {"m3", 0}},
             {{"m1", 0}, {"m2", 1}, {"m3", 0}},
             {{"m1", 0}, {"m2", 0}, {"m3", 1}}});
    return b.spec;
}

// The Ingenuity vision pipeline as a plain routed spec: one image
// out of ten refreshes the pseudo landmarks, the rest feed the tracker.
Spec ingenuity_routed(const std::string& name) {
    Builder b(name);
    b.actor("Camera").timed("Camera", Rational(30));
    b.actor("FeatureDetection");
    b.actor("SPL", ActorKind::Splitter);
    b.actor("PseudoLandmarks");
    b.actor("FeatureTracking");
    b.actor("FilteringProcedure");
    b.actor("JOIN", ActorKind::Joiner);
    b.actor("FeatureMatch").timed("FeatureMatch", Rational(30));
    b.channel("cam_fd", "Camera", 0, "FeatureDetection", 0, one(), one());
    b.channel("fd_spl", "FeatureDetection", 0, "SPL", 0, one(), one());
    b.channel("spl_pl", "SPL", 0, "PseudoLandmarks", 0, rate(1, 10), one(), Rational(9, 10));
    b.channel("spl_ft", "SPL", 1, "FeatureTracking", 0, rate(9, 10), one());
    b.channel("pl_join", "PseudoLandmarks", 0, "JOIN", 0, one(), rate(1, 10));
    b.channel("ft_ft", "FeatureTracking", 1, "FeatureTracking", 1, one(), one(), Rational(1));
    b.channel("ft_or", "FeatureTracking", 0, "FilteringProcedure", 0, one(), one());
    b.channel("or_join", "FilteringProcedure", 0, "JOIN", 1, one(), rate(9, 10), Rational(9, 10));
    b.channel("join_fm", "JOIN", 0, "FeatureMatch", 0, one(), one());
    return b.spec;
}

// The mode-dependent Ingenuity spec: the label decider routes each frame's
// features either to the pseudo-landmark store or to the tracking branch.
Spec ingenuity_rmdf(const std::string& name, bool modified) {
    Builder b(name);
    b.actor("Camera").timed("Camera", Rational(30)).cost("Camera", Rational(3, 25), Rational(1, 5));
    b.actor("FeatureDetection").cost("FeatureDetection", Rational(3, 25), Rational(1, 5));
    b.actor("Dup1", ActorKind::Duplicater).cost("Dup1", Rational(0), Rational(0));
    b.actor("LabelDecider", ActorKind::ModeDecider)
        .cost("LabelDecider", Rational(3, 25), Rational(1, 5));
    b.actor("Dup2", ActorKind::Duplicater).cost("Dup2", Rational(0), Rational(0));
    b.actor("CS", ActorKind::ControlledSplitter).cost("CS", Rational(3, 25), Rational(1, 5));
    b.actor("PseudoLandmarks").cost("PseudoLandmarks", Rational(3, 25), Rational(1, 5));
    b.actor("FeatureTracking").cost("FeatureTracking", Rational(3, 25), Rational(1, 5));
    b.actor("FilteringProcedure").cost("FilteringProcedure", Rational(3, 25), Rational(1, 5));
    b.actor("CJ", ActorKind::ControlledJoiner).cost("CJ", Rational(3, 25), Rational(1, 5));
    b.actor("FeatureMatch").cost("FeatureMatch", Rational(3, 25), Rational(1, 5));
    if (!modified) b.timed("FeatureMatch", Rational(30));
    b.channel("cam_fd", "Camera", 0, "FeatureDetection", 0, one(), one());
    b.channel("fd_dup", "FeatureDetection", 0, "Dup1", 0, one(), one());
    b.channel("dup_ld", "Dup1", 0, "LabelDecider", 0, one(), one());
    b.channel("dup_cs", "Dup1", 1, "CS", 0, one(), one());
    b.channel("ld_dup2", "LabelDecider", 0, "Dup2", 0, one(), one(), Rational(0), true);
    b.channel("dup2_cs", "Dup2", 0, "CS", 1, one(), one(), Rational(0), true);
    b.channel("dup2_cj", "Dup2", 1, "CJ", 2, one(), one(), Rational(0), true);
    b.channel("cs_pl", "CS", 0, "PseudoLandmarks", 0, param("m1"), one());
    b.channel("cs_ft", "CS", 1, "FeatureTracking", 0, param("m2"), one());
    b.channel("pl_cj", "PseudoLandmarks", 0, "CJ", 0, one(), param("m1"));
    b.channel("ft_ft", "FeatureTracking", 1, "FeatureTracking", 1, one(), one(), Rational(1));
    b.channel("ft_or", "FeatureTracking", 0, "FilteringProcedure", 0, one(), one());
    b.channel("or_cj", "FilteringProcedure", 0, "CJ", 1, one(), param("m2"));
    b.channel("cj_fm", "CJ", 0, "FeatureMatch", 0, one(), one());
    if (modified) {
        b.actor("Motors").timed("Motors", Rational(500), Rational(1))
            .cost("Motors", Rational(3, 25), Rational(1, 5));
        b.channel("fm_mot", "FeatureMatch", 0, "Motors", 0, one(), rate(3, 50), Rational(1, 50));
    }
    b.modes({{{"m1", 1}, {"m2", 0}}, {{"m1", 0}, {"m2", 1}}});
    return b.spec;
}

Spec build(const std::string& name) {
    if (name == "fig2a_splitter") return splitter_example(name);
    if (name == "fig2b_joiner") return joiner_example(name);
    if (name == "fig2c_duplicater") return duplicater_example(name);
    if (name == "fig2d_discard") return discard_example(name);
    if (name == "fig5a_routed") return splitter_example(name);
    if (name == "fig5a_plain") return splitter_plain(name);
    if (name == "fig5b_routed") return joiner_example(name);
    if (name == "fig5b_plain") return joiner_plain(name);
    if (name == "fig5c_routed") return duplicater_example(name);
    if (name == "fig5c_plain") return duplicater_plain(name);
    if (name == "fig5d_routed") return discard_example(name);
    if (name == "fig5d_plain") return discard_plain(name);
    if (name == "fig8") return three_branch_example(name);
    if (name == "fig9a") {
        Spec s = three_branch_example(name);
        Builder b("");
        b.spec = std::move(s);
        b.channel("c1_d1", "C1", 1, "D1", 1, one(), one());
        b.spec.name = name;
        return b.spec;
    }
    if (name == "fig9b") {
        Spec s = three_branch_example(name);
        Builder b("");
        b.spec = std::move(s);
        b.channel("a_c1", "A", 1, "C1", 1, one(), one());
        b.channel("c1_f", "C1", 1, "F", 1, one(), one());
        b.spec.name = name;
        return b.spec;
    }
    if (name == "fig9c") return three_branch_frequencies(name);
    if (name == "fig9d") {
        Spec s = three_branch_example(name);
        for (auto& c : s.channels)
            if (c.id == "cs_c1") c.consumption_rate = RateExpr::constant(Rational(2));
        return s;
    }
    if (name == "fig9e") {
        Spec s = three_branch_example(name);
        s.mode_table.modes = {{{"m1", 1}, {"m2", 1}, {"m3", 0}}};
        return s;
    }
    if (name == "fig10a") return three_branch_example(name);
    if (name == "fig11a") return ingenuity_routed(name);
    if (name == "fig11b") return ingenuity_rmdf(name, false);
    if (name == "fig11c") return ingenuity_rmdf(name, true);
    throw model_error("unknown example '" + name + "'");
}

} // namespace

std::vector<std::string> example_names() {
    return {"fig2a_splitter", "fig2b_joiner", "fig2c_duplicater", "fig2d_discard",
            "fig5a_routed",   "fig5a_plain",  "fig5b_routed",     "fig5b_plain",
            "fig5c_routed",   "fig5c_plain",  "fig5d_routed",     "fig5d_plain",
            "fig8",           "fig9a",        "fig9b",            "fig9c",
            "fig9d",          "fig9e",        "fig10a",           "fig11a",
            "fig11b",         "fig11c"};
}

Spec example_spec(const std::string& name) { return build(name); }

std::vector<std::pair<std::string, Spec>> bundled_examples() {
    std::vector<std::pair<std::string, Spec>> out;
    for (const auto& name : example_names()) out.emplace_back(name, build(name));
    return out;
}

} // namespace rmdf
