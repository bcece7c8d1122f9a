#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "hnp3/likelihood.hpp"
#include "hnp3/model_state.hpp"
#include "hnp3/types.hpp"

namespace hnp3 {

struct InferOptions {
    int P = 8;
    double ess_threshold = 0.5;  // resample when ESS < threshold * P
    std::uint64_t seed = 0;
    StateOptions state;
};

/// One hypothesis about the full latent history.
struct Particle {
    ModelState state;
    std::vector<BranchingRecord> records;
    double log_weight = 0.0;  // normalized across the filter after each event
    bool degenerate = false;
};

struct TopicSummary {
    TopicId id = 0;
    double beta = 0.0;
    std::int64_t event_count = 0;
    std::vector<std::pair<TokenId, double>> top_words;  // count-descending
};

/// Read-only snapshot of the highest-weight particle.
struct MapSummary {
    std::vector<BranchingRecord> records;
    std::vector<TopicId> assignments;
    std::vector<EventIndex> cascade_root;  // exogenous ancestor per event
    int n_topics = 0;
    std::vector<int> user_topic_counts;
    std::vector<TopicSummary> topics;
    RateEstimates rates;
    double t_last = 0.0;
};

/// Deterministic per-(event, particle) random stream derivation.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t tag);

/// Systematic resampling: offspring counts for normalized weights given one
/// uniform offset in [0, 1).
std::vector<int> systematic_offspring(std::span<const double> weights, int count, double offset);

/// 1 / sum(w^2) for normalized weights.
double effective_sample_size(std::span<const double> normalized_weights);

/// Online filter over latent (trigger, topic) histories.
class ParticleFilter {
public:
    ParticleFilter(const Hyperparams& hp, const InferOptions& opt);

    /// Fold in the next event: per-particle posterior proposal, weight
    /// update, normalization, and resampling if the ESS drops too low.
    void observe(const Event& e);

    double ess() const;
    double log_marginal() const { return log_marginal_; }
    std::int64_t n_observed() const { return n_observed_; }
    double t_last() const { return t_last_; }

    const Hyperparams& hyperparams() const { return hp_; }
    const InferOptions& options() const { return opt_; }
    const std::vector<Particle>& particles() const { return particles_; }
    std::vector<double> normalized_weights() const;
    std::size_t map_index() const;
    const Particle& map_particle() const { return particles_[map_index()]; }

    MapSummary map_summary(std::size_t top_words = 20) const;

    nlohmann::json to_json() const;
    /// Rebuild a filter by replaying the stored records over the events it
    /// had consumed.
    static ParticleFilter from_json(const nlohmann::json& j, std::span<const Event> events);

private:
    void validate_event(const Event& e) const;
    void resample(std::mt19937_64& rng);

    Hyperparams hp_;
    InferOptions opt_;
    std::vector<Particle> particles_;
    double log_marginal_ = 0.0;
    std::int64_t n_observed_ = 0;
    double t_last_ = 0.0;
};

/// Cascade roots implied by a record list: each event's exogenous ancestor.
std::vector<EventIndex> cascade_roots(std::span<const BranchingRecord> records);

}  // namespace hnp3
