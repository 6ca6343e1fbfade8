#include "mawhf/model.hpp"

#include <fstream>

namespace mawhf {

using nlohmann::json;

namespace {

Vector vec_from(const json& j, int m, const char* key) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != m)
        throw DomainError(std::string("model JSON: '") + key + "' must be an array of length m");
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = arr[i].get<double>();
    return v;
}

json vec_to(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

NegativeMixture mixture_from(const json& arr) {
    NegativeMixture mix;
    if (!arr.is_array()) throw DomainError("model JSON: mixture must be an array of components");
    for (const auto& c : arr) {
        MixtureComponent comp;
        comp.weight = c.at("w").get<double>();
        const auto kind = c.at("kind").get<std::string>();
        if (kind == "atom") {
            comp.kind = MixtureComponent::Kind::atom;
            comp.location = c.at("x").get<double>();
        } else if (kind == "erlang") {
            comp.kind = MixtureComponent::Kind::erlang;
            comp.rate = c.at("rate").get<double>();
            comp.shape = c.value("shape", 1);
        } else {
            throw DomainError("model JSON: unknown mixture kind '" + kind + "'");
        }
        mix.components.push_back(comp);
    }
    return mix;
}

json mixture_to(const NegativeMixture& mix) {
    json arr = json::array();
    for (const auto& c : mix.components) {
        if (c.kind == MixtureComponent::Kind::atom) {
            arr.push_back({{"w", c.weight}, {"kind", "atom"}, {"x", c.location}});
        } else {
            arr.push_back({{"w", c.weight}, {"kind", "erlang"}, {"rate", c.rate}, {"shape", c.shape}});
        }
    }
    return arr;
}

ModelSpec parse(const json& j) {
    if (!j.is_object()) throw DomainError("model JSON: top level must be an object");
    if (j.contains("mawhf_schema") && j.at("mawhf_schema").get<int>() != kModelSchemaVersion)
        throw DomainError("model JSON: unsupported mawhf_schema version");
    const int m = j.at("m").get<int>();
    if (m < 1 || m > 64) throw DomainError("model JSON: m must be in [1, 64]");
    ModelSpec s = ModelSpec::make(m);
    s.nu = vec_from(j, m, "nu");
    const auto& emb = j.at("embedded");
    if (!emb.is_array() || static_cast<int>(emb.size()) != m) throw DomainError("model JSON: 'embedded' must be m x m");
    for (int k = 0; k < m; ++k) {
        if (!emb[k].is_array() || static_cast<int>(emb[k].size()) != m)
            throw DomainError("model JSON: 'embedded' must be m x m");
        for (int r = 0; r < m; ++r) s.embedded(k, r) = emb[k][r].get<double>();
    }
    s.a = vec_from(j, m, "a");
    s.b2 = j.contains("b2") ? vec_from(j, m, "b2") : Vector::Zero(m);
    s.lambda = vec_from(j, m, "lambda");
    s.c = vec_from(j, m, "c");
    s.pos_weight = vec_from(j, m, "pos_weight");
    if (j.contains("neg_jump")) {
        const auto& nj = j.at("neg_jump");
        if (!nj.is_array() || static_cast<int>(nj.size()) != m)
            throw DomainError("model JSON: 'neg_jump' must hold one mixture per state");
        for (int k = 0; k < m; ++k) s.neg_jump[k] = mixture_from(nj[k]);
    }
    if (j.contains("switch_jump")) {
        for (const auto& e : j.at("switch_jump")) {
            const int from = e.at("from").get<int>();
            const int to = e.at("to").get<int>();
            if (from < 0 || from >= m || to < 0 || to >= m)
                throw DomainError("model JSON: switch_jump state index out of range");
            SwitchJumpLaw law;
            law.atom0 = e.value("atom0", 1.0);
            if (e.contains("neg")) law.neg = mixture_from(e.at("neg"));
            s.switch_jump[from][to] = law;
        }
    }
    s.zero_drift = j.value("zero_drift", false);
    const auto orient = j.value("orientation", std::string("upper"));
    if (orient == "upper") {
        s.orientation = Orientation::upper;
    } else if (orient == "lower") {
        s.orientation = Orientation::lower;
    } else {
        throw DomainError("model JSON: orientation must be 'upper' or 'lower'");
    }
    return s;
}

}  // namespace

ModelSpec model_from_json(const json& j) {
    try {
        return parse(j);
    } catch (const json::exception& e) {
        throw DomainError(std::string("model JSON: ") + e.what());
    }
}

json model_to_json(const ModelSpec& spec) {
    json j;
    j["mawhf_schema"] = kModelSchemaVersion;
    j["m"] = spec.m;
    j["nu"] = vec_to(spec.nu);
    json emb = json::array();
    for (int k = 0; k < spec.m; ++k) emb.push_back(vec_to(spec.embedded.row(k).transpose()));
    j["embedded"] = emb;
    j["a"] = vec_to(spec.a);
    j["lambda"] = vec_to(spec.lambda);
    j["c"] = vec_to(spec.c);
    j["pos_weight"] = vec_to(spec.pos_weight);
    json nj = json::array();
    for (const auto& mix : spec.neg_jump) nj.push_back(mixture_to(mix));
    j["neg_jump"] = nj;
    json sj = json::array();
    for (int k = 0; k < spec.m; ++k)
        for (int r = 0; r < spec.m; ++r) {
            const auto& law = spec.switch_jump[k][r];
            if (law.atom0 == 1.0 && law.neg.empty()) continue;
            json e{{"from", k}, {"to", r}, {"atom0", law.atom0}};
            if (!law.neg.empty()) e["neg"] = mixture_to(law.neg);
            sj.push_back(e);
        }
    j["switch_jump"] = sj;
    j["zero_drift"] = spec.zero_drift;
    j["orientation"] = spec.orientation == Orientation::upper ? "upper" : "lower";
    return j;
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open model file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DomainError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    return model_from_json(j);
}

}  // namespace mawhf
