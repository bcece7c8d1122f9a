#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hnp3/inference.hpp"
#include "hnp3/simulator.hpp"
#include "hnp3/types.hpp"

namespace hnp3 {

/// Synthetic ground-truth description. Explicit arrays win over the random
/// recipes; random pieces are drawn deterministically from the seed.
struct SimulationConfig {
    double horizon = std::numeric_limits<double>::infinity();
    std::int64_t target_events = -1;
    std::uint64_t seed = 1;
    double doc_mean_len = 20.0;
    bool topicless = false;
    std::int64_t event_cap = 1000000;

    std::vector<double> mu;        // explicit per-user rates
    double mu_value = 0.05;        // otherwise constant across users

    std::vector<std::vector<double>> alpha;  // explicit rows
    double alpha_max = 0.1;                  // otherwise Uniform[0, alpha_max]
    double alpha_sparsity = 0.5;             // fraction of entries forced to zero

    int n_topics = 0;                        // 0 = draw topics from the priors
    std::vector<double> beta;                // explicit per-topic rates
    std::string phi = "dirichlet";           // dirichlet | disjoint | explicit
    double phi_concentration = 0.1;
    std::vector<std::vector<double>> phi_rows;
};

struct InferenceConfig {
    InferOptions options;
};

struct EvalConfig {
    double train_frac = 0.8;
    std::int64_t horizon = 100;
    std::vector<std::int64_t> checkpoints;  // empty = auto log-spaced
    int grid_points = 200;
    int bootstrap_resamples = 1000;
    int top_words = 20;
};

struct ExperimentConfig {
    Hyperparams hyperparams;
    SimulationConfig simulation;
    InferenceConfig inference;
    EvalConfig eval;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    void validate() const;
};

/// Materialize the simulation inputs (exogenous rates, influence matrix,
/// topic pool) from a config, drawing any random pieces from the seed.
struct SimulationInputs {
    std::vector<double> mu;
    std::vector<double> alpha;  // U*U row-major
    std::optional<TopicTruthSpec> topics;
    SimOptions options;
};
SimulationInputs build_simulation_inputs(const ExperimentConfig& config);

/// Default checkpoint schedule: log-spaced {100, 200, 500, ...} up to n.
std::vector<std::int64_t> default_checkpoints(std::int64_t n);

}  // namespace hnp3
