#include "hnp3/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "hnp3/serialize.hpp"

namespace hnp3 {

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("hyperparams")) c.hyperparams = j.at("hyperparams").get<Hyperparams>();

    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        auto& sim = c.simulation;
        if (s.contains("horizon") && !s.at("horizon").is_null()) {
            sim.horizon = s.at("horizon").get<double>();
        }
        sim.target_events = s.value("target_events", sim.target_events);
        sim.seed = s.value("seed", sim.seed);
        sim.doc_mean_len = s.value("doc_mean_len", sim.doc_mean_len);
        sim.topicless = s.value("topicless", sim.topicless);
        sim.event_cap = s.value("event_cap", sim.event_cap);
        if (s.contains("mu")) {
            if (s.at("mu").is_array()) {
                sim.mu = s.at("mu").get<std::vector<double>>();
            } else {
                sim.mu_value = s.at("mu").get<double>();
            }
        }
        if (s.contains("alpha")) {
            if (s.at("alpha").is_array()) {
                sim.alpha = s.at("alpha").get<std::vector<std::vector<double>>>();
            } else {
                const auto& a = s.at("alpha");
                sim.alpha_max = a.value("max", sim.alpha_max);
                sim.alpha_sparsity = a.value("sparsity", sim.alpha_sparsity);
            }
        }
        if (s.contains("topics")) {
            const auto& t = s.at("topics");
            sim.n_topics = t.value("count", sim.n_topics);
            if (t.contains("beta")) sim.beta = t.at("beta").get<std::vector<double>>();
            sim.phi = t.value("phi", sim.phi);
            sim.phi_concentration = t.value("phi_concentration", sim.phi_concentration);
            if (t.contains("phi_rows")) {
                sim.phi_rows = t.at("phi_rows").get<std::vector<std::vector<double>>>();
                sim.phi = "explicit";
            }
        }
    }

    if (j.contains("inference")) {
        const auto& inf = j.at("inference");
        auto& o = c.inference.options;
        o.P = inf.value("P", c.hyperparams.P);
        o.ess_threshold = inf.value("ess_threshold", o.ess_threshold);
        o.seed = inf.value("seed", o.seed);
        if (inf.contains("mode")) o.state.mode = inf.at("mode").get<ModelMode>();
        o.state.refresh_every = inf.value("refresh_every", o.state.refresh_every);
        o.state.truncation_w = inf.value("truncation_w", o.state.truncation_w);
        o.state.times_only = inf.value("times_only", o.state.times_only);
        if (inf.contains("M")) c.hyperparams.M = inf.at("M").get<int>();
    } else {
        c.inference.options.P = c.hyperparams.P;
    }

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        auto& ev = c.eval;
        ev.train_frac = e.value("train_frac", ev.train_frac);
        ev.horizon = e.value("horizon", ev.horizon);
        if (e.contains("checkpoints")) {
            ev.checkpoints = e.at("checkpoints").get<std::vector<std::int64_t>>();
        }
        ev.grid_points = e.value("grid_points", ev.grid_points);
        ev.bootstrap_resamples = e.value("bootstrap_resamples", ev.bootstrap_resamples);
        ev.top_words = e.value("top_words", ev.top_words);
    }

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

void ExperimentConfig::validate() const {
    hyperparams.validate();
    if (!(eval.train_frac > 0.0 && eval.train_frac < 1.0)) {
        throw std::invalid_argument("eval.train_frac must lie in (0, 1)");
    }
    if (inference.options.P < 1) {
        throw std::invalid_argument("inference.P must be >= 1");
    }
    if (!simulation.mu.empty() &&
        static_cast<int>(simulation.mu.size()) != hyperparams.U) {
        throw std::invalid_argument("simulation.mu length must equal U");
    }
    if (!simulation.alpha.empty() &&
        static_cast<int>(simulation.alpha.size()) != hyperparams.U) {
        throw std::invalid_argument("simulation.alpha must be a U x U matrix");
    }
}

SimulationInputs build_simulation_inputs(const ExperimentConfig& config) {
    const Hyperparams& hp = config.hyperparams;
    const SimulationConfig& sim = config.simulation;
    const int U = hp.U;

    SimulationInputs inputs;
    inputs.options.horizon = sim.horizon;
    inputs.options.target_events = sim.target_events;
    inputs.options.doc_mean_len = sim.doc_mean_len;
    inputs.options.topicless = sim.topicless;
    inputs.options.event_cap = sim.event_cap;

    // Random pieces come from a stream separate from the event noise so the
    // same truth can be paired with different simulation seeds if needed.
    std::mt19937_64 rng(sim.seed ^ 0xA02F7C5844D3BF17ull);

    if (!sim.mu.empty()) {
        inputs.mu = sim.mu;
    } else {
        inputs.mu.assign(static_cast<std::size_t>(U), sim.mu_value);
    }

    inputs.alpha.assign(static_cast<std::size_t>(U) * U, 0.0);
    if (!sim.alpha.empty()) {
        for (int v = 0; v < U; ++v) {
            if (static_cast<int>(sim.alpha[static_cast<std::size_t>(v)].size()) != U) {
                throw std::invalid_argument("simulation.alpha rows must have length U");
            }
            for (int u = 0; u < U; ++u) {
                inputs.alpha[static_cast<std::size_t>(v) * U + u] =
                    sim.alpha[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
            }
        }
    } else {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (auto& a : inputs.alpha) {
            const double keep = unif(rng);
            const double value = unif(rng) * sim.alpha_max;
            a = keep < sim.alpha_sparsity ? 0.0 : value;
        }
    }

    if (!sim.topicless && (sim.n_topics > 0 || !sim.beta.empty())) {
        TopicTruthSpec spec;
        const int K = sim.n_topics > 0 ? sim.n_topics : static_cast<int>(sim.beta.size());
        if (!sim.beta.empty()) {
            if (static_cast<int>(sim.beta.size()) != K) {
                throw std::invalid_argument("topics.beta length must match topics.count");
            }
            spec.beta = sim.beta;
        } else {
            std::gamma_distribution<double> gamma(hp.beta_prior.shape, 1.0 / hp.beta_prior.rate);
            spec.beta.resize(static_cast<std::size_t>(K));
            for (auto& b : spec.beta) b = gamma(rng);
        }
        if (sim.phi == "explicit") {
            if (static_cast<int>(sim.phi_rows.size()) != K) {
                throw std::invalid_argument("topics.phi_rows must have one row per topic");
            }
            spec.phi = sim.phi_rows;
        } else if (sim.phi == "disjoint") {
            // Contiguous vocabulary blocks, uniform within each block.
            spec.phi.assign(static_cast<std::size_t>(K),
                            std::vector<double>(static_cast<std::size_t>(hp.V), 0.0));
            const int block = hp.V / K;
            if (block == 0) {
                throw std::invalid_argument("V must be >= topic count for disjoint phi");
            }
            for (int k = 0; k < K; ++k) {
                const int lo = k * block;
                const int hi = (k == K - 1) ? hp.V : lo + block;
                for (int w = lo; w < hi; ++w) {
                    spec.phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)] =
                        1.0 / (hi - lo);
                }
            }
        } else if (sim.phi == "dirichlet") {
            std::gamma_distribution<double> gamma(sim.phi_concentration, 1.0);
            spec.phi.assign(static_cast<std::size_t>(K),
                            std::vector<double>(static_cast<std::size_t>(hp.V), 0.0));
            for (auto& row : spec.phi) {
                double total = 0.0;
                for (auto& x : row) {
                    x = gamma(rng);
                    total += x;
                }
                if (total <= 0.0) {
                    std::fill(row.begin(), row.end(), 1.0 / hp.V);
                    total = 1.0;
                } else {
                    for (auto& x : row) x /= total;
                }
            }
        } else {
            throw std::invalid_argument("unknown topics.phi mode: " + sim.phi);
        }
        inputs.topics = std::move(spec);
    }

    return inputs;
}

std::vector<std::int64_t> default_checkpoints(std::int64_t n) {
    std::vector<std::int64_t> points;
    const std::int64_t bases[] = {1, 2, 5};
    for (std::int64_t scale = 100; scale <= n; scale *= 10) {
        for (std::int64_t b : bases) {
            const std::int64_t p = b * scale;
            if (p <= n) points.push_back(p);
        }
    }
    if (points.empty() || points.back() != n) points.push_back(n);
    return points;
}

}  // namespace hnp3
