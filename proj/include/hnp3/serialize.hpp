#pragma once

#include <json.hpp>

#include "hnp3/inference.hpp"
#include "hnp3/model_state.hpp"
#include "hnp3/types.hpp"

namespace hnp3 {

inline void to_json(nlohmann::json& j, const GammaPrior& p) {
    j = nlohmann::json{{"shape", p.shape}, {"rate", p.rate}};
}

inline void from_json(const nlohmann::json& j, GammaPrior& p) {
    p.shape = j.value("shape", p.shape);
    p.rate = j.value("rate", p.rate);
}

inline void to_json(nlohmann::json& j, const Hyperparams& hp) {
    j = nlohmann::json{{"gamma", hp.gamma},           {"zeta", hp.zeta},
                       {"nu", hp.nu},                 {"eta", hp.eta},
                       {"beta_prior", hp.beta_prior}, {"mu_prior", hp.mu_prior},
                       {"alpha_prior", hp.alpha_prior}, {"M", hp.M},
                       {"P", hp.P},                   {"U", hp.U},
                       {"V", hp.V}};
}

inline void from_json(const nlohmann::json& j, Hyperparams& hp) {
    hp.gamma = j.value("gamma", hp.gamma);
    hp.zeta = j.value("zeta", hp.zeta);
    hp.nu = j.value("nu", hp.nu);
    hp.eta = j.value("eta", hp.eta);
    if (j.contains("beta_prior")) hp.beta_prior = j.at("beta_prior").get<GammaPrior>();
    if (j.contains("mu_prior")) hp.mu_prior = j.at("mu_prior").get<GammaPrior>();
    if (j.contains("alpha_prior")) hp.alpha_prior = j.at("alpha_prior").get<GammaPrior>();
    hp.M = j.value("M", hp.M);
    hp.P = j.value("P", hp.P);
    hp.U = j.value("U", hp.U);
    hp.V = j.value("V", hp.V);
}

inline void to_json(nlohmann::json& j, const ModelMode& m) {
    j = (m == ModelMode::single_topic) ? "single_topic" : "full";
}

inline void from_json(const nlohmann::json& j, ModelMode& m) {
    const std::string s = j.get<std::string>();
    if (s == "single_topic" || s == "hawkes") {
        m = ModelMode::single_topic;
    } else if (s == "full" || s == "hnp3") {
        m = ModelMode::full;
    } else {
        throw std::invalid_argument("unknown model mode: " + s);
    }
}

inline void to_json(nlohmann::json& j, const StateOptions& o) {
    j = nlohmann::json{{"mode", o.mode},
                       {"refresh_every", o.refresh_every},
                       {"truncation_w", o.truncation_w},
                       {"times_only", o.times_only}};
}

inline void from_json(const nlohmann::json& j, StateOptions& o) {
    if (j.contains("mode")) o.mode = j.at("mode").get<ModelMode>();
    o.refresh_every = j.value("refresh_every", o.refresh_every);
    o.truncation_w = j.value("truncation_w", o.truncation_w);
    o.times_only = j.value("times_only", o.times_only);
}

inline void to_json(nlohmann::json& j, const InferOptions& o) {
    j = nlohmann::json{{"P", o.P},
                       {"ess_threshold", o.ess_threshold},
                       {"seed", o.seed},
                       {"state", o.state}};
}

inline void from_json(const nlohmann::json& j, InferOptions& o) {
    o.P = j.value("P", o.P);
    o.ess_threshold = j.value("ess_threshold", o.ess_threshold);
    o.seed = j.value("seed", o.seed);
    if (j.contains("state")) o.state = j.at("state").get<StateOptions>();
}

// Records are stored compactly as [trigger, topic, new_local].
inline void to_json(nlohmann::json& j, const BranchingRecord& r) {
    j = nlohmann::json::array({r.trigger, r.topic, r.new_local ? 1 : 0});
}

inline void from_json(const nlohmann::json& j, BranchingRecord& r) {
    r.trigger = j.at(0).get<EventIndex>();
    r.topic = j.at(1).get<TopicId>();
    r.new_local = j.at(2).get<int>() != 0;
}

}  // namespace hnp3
