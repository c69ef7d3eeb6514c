#include "affmon/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace affmon {

using nlohmann::json;

const char* kind_name(ProblemFile::Kind k) {
    switch (k) {
    case ProblemFile::Kind::Affine: return "affine";
    case ProblemFile::Kind::Multiplicative: return "multiplicative";
    case ProblemFile::Kind::Exponential: return "exponential";
    case ProblemFile::Kind::ShortestPath: return "shortest-path";
    }
    return "affine";
}

ModelSpec ProblemFile::to_model() const {
    switch (kind) {
    case Kind::Affine: return affine;
    case Kind::Multiplicative: return build_multiplicative(chain);
    case Kind::Exponential: return build_exponential(chain);
    case Kind::ShortestPath: return build_deterministic_sp(arcs, arcs_n);
    }
    return affine;
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
    throw Error("ParseError", what);
}

double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where + " must be a number");
    const double v = j.get<double>();
    if (std::isnan(v) || std::isinf(v)) parse_fail(where + " must be finite");
    return v;
}

int int_at(const json& j, const std::string& where) {
    if (!j.is_number_integer()) parse_fail(where + " must be an integer");
    return j.get<int>();
}

const json& member(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) parse_fail(std::string("missing field \"") + key + "\"");
    return *it;
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) parse_fail(where + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(number_at(j[k], where + "[" + std::to_string(k) + "]"));
    }
    return out;
}

// control labels: optional in the file, defaulted to u<index>
std::vector<std::vector<std::string>> labels_for(const json& j, int n,
                                                 const std::vector<std::size_t>& counts) {
    std::vector<std::vector<std::string>> labels(static_cast<std::size_t>(n));
    auto it = j.find("controls");
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (it != j.end()) {
            if (!it->is_array() || it->size() != static_cast<std::size_t>(n)) {
                parse_fail("\"controls\" must list one label array per state");
            }
            const json& per_state = (*it)[idx];
            if (!per_state.is_array()) parse_fail("\"controls\" entries must be arrays");
            for (const json& l : per_state) {
                if (!l.is_string()) parse_fail("control labels must be strings");
                labels[idx].push_back(l.get<std::string>());
            }
        } else {
            for (std::size_t u = 0; u < counts[idx]; ++u) {
                labels[idx].push_back("u" + std::to_string(u));
            }
        }
        if (it != j.end() && labels[idx].size() != counts[idx]) {
            parse_fail("state " + std::to_string(i) + " has " +
                       std::to_string(labels[idx].size()) + " labels for " +
                       std::to_string(counts[idx]) + " controls");
        }
    }
    return labels;
}

ModelSpec parse_affine(const json& j) {
    ModelSpec model;
    model.n = int_at(member(j, "n"), "\"n\"");
    if (model.n < 1) parse_fail("\"n\" must be positive");
    const auto n = static_cast<std::size_t>(model.n);

    const json& a = member(j, "A");
    const json& b = member(j, "b");
    if (!a.is_array() || a.size() != n) parse_fail("\"A\" must have one entry per state");
    if (!b.is_array() || b.size() != n) parse_fail("\"b\" must have one entry per state");

    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!a[i].is_array() || !b[i].is_array()) {
            parse_fail("\"A\" and \"b\" entries must be per-control arrays");
        }
        if (a[i].size() != b[i].size()) {
            parse_fail("state " + std::to_string(i) + " has mismatched \"A\" and \"b\" sizes");
        }
        counts[i] = a[i].size();
    }
    const auto labels = labels_for(j, model.n, counts);

    model.controls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t u = 0; u < counts[i]; ++u) {
            Control c;
            c.label = labels[i][u];
            c.row = number_list(a[i][u], "\"A\" row");
            c.cost = number_at(b[i][u], "\"b\" entry");
            model.controls[i].push_back(std::move(c));
        }
    }
    model.jbar = number_list(member(j, "jbar"), "\"jbar\"");
    return model;
}

TerminatingChainSpec parse_chain(const json& j, ChainKind kind) {
    TerminatingChainSpec spec;
    spec.kind = kind;
    spec.n = int_at(member(j, "n"), "\"n\"");
    if (spec.n < 1) parse_fail("\"n\" must be positive");
    const auto n = static_cast<std::size_t>(spec.n);

    const json& p = member(j, "p");
    const char* stage_key = kind == ChainKind::Exponential ? "g" : "h";
    const json& stage = member(j, stage_key);
    if (!p.is_array() || p.size() != n) parse_fail("\"p\" must have one entry per state");
    if (!stage.is_array() || stage.size() != n) {
        parse_fail(std::string("\"") + stage_key + "\" must have one entry per state");
    }

    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!p[i].is_array() || !stage[i].is_array() || p[i].size() != stage[i].size()) {
            parse_fail("state " + std::to_string(i) + " has mismatched \"p\" and stage sizes");
        }
        counts[i] = p[i].size();
    }
    const auto labels = labels_for(j, spec.n, counts);

    spec.controls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t u = 0; u < counts[i]; ++u) {
            ChainControl c;
            c.label = labels[i][u];
            c.p = number_list(p[i][u], "\"p\" entry");
            c.stage = number_list(stage[i][u], std::string("\"") + stage_key + "\" entry");
            spec.controls[i].push_back(std::move(c));
        }
    }
    return spec;
}

std::pair<std::vector<Arc>, int> parse_arcs(const json& j) {
    const int n = int_at(member(j, "n"), "\"n\"");
    const json& list = member(j, "arcs");
    if (!list.is_array()) parse_fail("\"arcs\" must be an array");
    std::vector<Arc> arcs;
    for (const json& a : list) {
        Arc arc;
        arc.from = int_at(member(a, "from"), "\"from\"");
        const json& to = member(a, "to");
        if (to.is_string()) {
            if (to.get<std::string>() != "t") parse_fail("\"to\" must be a state index or \"t\"");
            arc.to = kTerminalState;
        } else {
            arc.to = int_at(to, "\"to\"");
        }
        arc.length = number_at(member(a, "g"), "arc \"g\"");
        arcs.push_back(arc);
    }
    return {arcs, n};
}

} // namespace

ProblemFile parse_problem_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("ParseError", e.what());
    }
    if (!j.is_object()) parse_fail("problem file must be a JSON object");

    ProblemFile pf;
    const json& kind = member(j, "kind");
    if (!kind.is_string()) parse_fail("\"kind\" must be a string");
    const std::string k = kind.get<std::string>();

    try {
        if (k == "affine") {
            pf.kind = ProblemFile::Kind::Affine;
            pf.affine = parse_affine(j);
            validate_model(pf.affine);
        } else if (k == "multiplicative" || k == "exponential") {
            pf.kind = k == "multiplicative" ? ProblemFile::Kind::Multiplicative
                                            : ProblemFile::Kind::Exponential;
            pf.chain = parse_chain(j, k == "multiplicative" ? ChainKind::Multiplicative
                                                            : ChainKind::Exponential);
            validate_chain(pf.chain);
        } else if (k == "shortest-path") {
            pf.kind = ProblemFile::Kind::ShortestPath;
            auto [arcs, n] = parse_arcs(j);
            pf.arcs = std::move(arcs);
            pf.arcs_n = n;
            build_deterministic_sp(pf.arcs, pf.arcs_n); // validates
        } else {
            parse_fail("unknown kind \"" + k + "\"");
        }
    } catch (const Error& e) {
        if (e.name() == "ParseError") throw;
        throw Error("ValidationError", e.name() + std::string(": ") + e.what());
    }

    if (auto it = j.find("name"); it != j.end() && it->is_string()) {
        pf.name = it->get<std::string>();
    }
    if (auto it = j.find("description"); it != j.end() && it->is_string()) {
        pf.description = it->get<std::string>();
    }
    return pf;
}

ProblemFile parse_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("ParseError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

namespace {

json labels_json(const std::vector<std::vector<ChainControl>>& controls) {
    json out = json::array();
    for (const auto& us : controls) {
        json per_state = json::array();
        for (const auto& c : us) per_state.push_back(c.label);
        out.push_back(std::move(per_state));
    }
    return out;
}

} // namespace

json problem_to_json(const ProblemFile& pf) {
    json j;
    j["kind"] = kind_name(pf.kind);
    if (!pf.name.empty()) j["name"] = pf.name;
    if (!pf.description.empty()) j["description"] = pf.description;

    switch (pf.kind) {
    case ProblemFile::Kind::Affine: {
        const ModelSpec& m = pf.affine;
        j["n"] = m.n;
        json labels = json::array();
        json a = json::array();
        json b = json::array();
        for (const auto& us : m.controls) {
            json state_labels = json::array();
            json state_a = json::array();
            json state_b = json::array();
            for (const Control& c : us) {
                state_labels.push_back(c.label);
                state_a.push_back(c.row);
                state_b.push_back(c.cost);
            }
            labels.push_back(std::move(state_labels));
            a.push_back(std::move(state_a));
            b.push_back(std::move(state_b));
        }
        j["controls"] = std::move(labels);
        j["A"] = std::move(a);
        j["b"] = std::move(b);
        j["jbar"] = m.jbar;
        break;
    }
    case ProblemFile::Kind::Multiplicative:
    case ProblemFile::Kind::Exponential: {
        const TerminatingChainSpec& s = pf.chain;
        j["n"] = s.n;
        j["controls"] = labels_json(s.controls);
        json p = json::array();
        json stage = json::array();
        for (const auto& us : s.controls) {
            json state_p = json::array();
            json state_stage = json::array();
            for (const ChainControl& c : us) {
                state_p.push_back(c.p);
                state_stage.push_back(c.stage);
            }
            p.push_back(std::move(state_p));
            stage.push_back(std::move(state_stage));
        }
        j["p"] = std::move(p);
        j[s.kind == ChainKind::Exponential ? "g" : "h"] = std::move(stage);
        break;
    }
    case ProblemFile::Kind::ShortestPath: {
        j["n"] = pf.arcs_n;
        json arcs = json::array();
        for (const Arc& a : pf.arcs) {
            json arc;
            arc["from"] = a.from;
            if (a.to == kTerminalState) {
                arc["to"] = "t";
            } else {
                arc["to"] = a.to;
            }
            arc["g"] = a.length;
            arcs.push_back(std::move(arc));
        }
        j["arcs"] = std::move(arcs);
        break;
    }
    }
    return j;
}

namespace {

void dump_value(const json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * (static_cast<std::size_t>(depth) + 1), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent) * static_cast<std::size_t>(depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            out += json(it.key()).dump();
            out += ": ";
            dump_value(it.value(), out, indent, depth + 1);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const json& v : j) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            dump_value(v, out, indent, depth + 1);
        }
        out += "\n" + close_pad + "]";
        return;
    }
    case json::value_t::number_float: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
        out += buf;
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string dump_json(const json& j, int indent) {
    std::string out;
    dump_value(j, out, indent, 0);
    return out;
}

json cost_to_json(double v) {
    if (std::isinf(v)) return json("inf");
    return json(v);
}

json cost_vector_to_json(const CostVector& j) {
    json out = json::array();
    for (double v : j) out.push_back(cost_to_json(v));
    return out;
}

} // namespace affmon
