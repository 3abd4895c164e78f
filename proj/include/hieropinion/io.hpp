#ifndef HIEROPINION_IO_HPP
#define HIEROPINION_IO_HPP

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hieropinion/consensus.hpp"
#include "hieropinion/model.hpp"

namespace hieropinion::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline nlohmann::json to_json(const OpinionDist& d) {
    switch (d.kind) {
    case DistKind::Uniform: return {{"type", "uniform"}, {"a", d.a}, {"b", d.b}};
    case DistKind::Point: return {{"type", "point"}, {"x", d.x}};
    case DistKind::Quantiles: return {{"type", "quantiles"}, {"values", d.q}};
    }
    throw std::logic_error("unknown distribution kind");
}

inline OpinionDist dist_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform")
        return OpinionDist::uniform(j.at("a").get<double>(), j.at("b").get<double>());
    if (type == "point") return OpinionDist::point(j.at("x").get<double>());
    if (type == "quantiles")
        return OpinionDist::quantile_list(j.at("values").get<std::vector<double>>());
    throw IoError("unknown distribution type: " + type);
}

inline nlohmann::json to_json(const ModelConfig& cfg) {
    nlohmann::json levels = nlohmann::json::array();
    for (const LevelSpec& lv : cfg.levels) {
        levels.push_back({{"h", lv.h},
                          {"fraction", lv.fraction},
                          {"stubborn_fraction", lv.stubborn_fraction},
                          {"ns_initial", to_json(lv.ns_initial)},
                          {"s_initial", to_json(lv.s_initial)}});
    }
    return {{"p", cfg.p}, {"gamma", cfg.gamma}, {"agents", cfg.agents}, {"levels", levels}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.p = j.at("p").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.agents = j.at("agents").get<std::int64_t>();
    for (const nlohmann::json& jl : j.at("levels")) {
        LevelSpec lv;
        lv.h = jl.at("h").get<double>();
        lv.fraction = jl.at("fraction").get<double>();
        lv.stubborn_fraction = jl.value("stubborn_fraction", 0.0);
        lv.ns_initial = dist_from_json(jl.at("ns_initial"));
        // stubborn agents default to the level's non-stubborn distribution
        lv.s_initial = jl.contains("s_initial") ? dist_from_json(jl.at("s_initial"))
                                                : lv.ns_initial;
        cfg.levels.push_back(std::move(lv));
    }
    return cfg;
}

inline ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

inline nlohmann::json to_json(const consensus::ConsensusResult& res) {
    nlohmann::json j{{"regime", consensus::regime_name(res.regime)}};
    if (res.regime != consensus::Regime::Unsolved) {
        j["m_inf_ns"] = res.m_inf_ns;
        j["m_inf_mixed"] = res.m_inf_mixed;
    }
    return j;
}

} // namespace hieropinion::io

#endif
