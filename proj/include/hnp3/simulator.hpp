#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "hnp3/types.hpp"

namespace hnp3 {

/// Explicit topic pool for ground-truth simulation. The pool acts as a
/// finite base measure: a shared new-topic draw lands on pool topic k with
/// probability (m_k(t) + zeta/K) / (zeta + m.(t)), so the stream uses
/// exactly these topics and faded topics can trend again.
struct TopicTruthSpec {
    std::vector<double> beta;               // per topic, > 0
    std::vector<std::vector<double>> phi;   // per topic, length V, sums to 1
};

struct SimOptions {
    double horizon = std::numeric_limits<double>::infinity();
    std::int64_t target_events = -1;  // stop after this many events; < 0 disables
    double doc_mean_len = 20.0;       // Poisson mean, redrawn to >= 1; 0 emits empty docs
    bool topicless = false;           // single forced topic, empty documents
    std::int64_t event_cap = 1000000; // abort guard for runaway (supercritical) runs
};

/// Everything the generator knows that inference must recover.
struct GroundTruth {
    std::vector<double> mu;                // per user
    std::vector<double> alpha;             // U*U row-major, row = source
    std::vector<double> beta;              // per global topic
    std::vector<std::vector<double>> phi;  // per global topic, length V
    std::vector<BranchingRecord> records;
    double branching_bound = 0.0;  // spectral radius of alpha / min(beta)

    int n_users() const { return static_cast<int>(mu.size()); }
    double alpha_at(UserId source, UserId target) const {
        return alpha[static_cast<std::size_t>(source) * mu.size() + target];
    }
};

struct SimResult {
    std::vector<Event> events;
    GroundTruth truth;
    double t_end = 0.0;
};

/// Spectral radius of the matrix with entries alpha[v][u] / beta_min, a
/// conservative bound on the expected-offspring matrix.
double branching_bound(const std::vector<double>& alpha, int U, double beta_min);

/// Generate a stream from the full generative model by thinning a
/// piecewise-constant upper bound of the total intensity. Deterministic
/// given the seed. Topics either come from an explicit pool or are drawn
/// lazily from the priors when the brand-new branch wins.
SimResult simulate(const Hyperparams& hp, const std::vector<double>& mu,
                   const std::vector<double>& alpha,
                   const std::optional<TopicTruthSpec>& topic_spec, const SimOptions& opt,
                   std::uint64_t seed);

}  // namespace hnp3
