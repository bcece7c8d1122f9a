#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hnp3/model_state.hpp"
#include "hnp3/types.hpp"

namespace hnp3 {

// ---------------------------------------------------------------------------
// Intensity pieces over an explicit history (events + their assignments).
// These recompute from scratch; the incremental counterparts live on
// ModelState.
// ---------------------------------------------------------------------------

/// Intensity contribution of one past event to user `target` at time t.
double trigger_component(const Event& source, TopicId source_topic, UserId target, double t,
                         const RateEstimates& rates, std::span<const double> betas);

/// Total intensity of `target` at time t given the full history.
double user_intensity(UserId target, double t, std::span<const Event> events,
                      std::span<const BranchingRecord> records, const RateEstimates& rates,
                      std::span<const double> betas);

/// Integrated intensity of `target` over [a, b].
double compensator(UserId target, double a, double b, std::span<const Event> events,
                   std::span<const BranchingRecord> records, const RateEstimates& rates,
                   std::span<const double> betas);

// ---------------------------------------------------------------------------
// Topic predictives.
// ---------------------------------------------------------------------------

/// One row of the per-user topic predictive. local < 0 encodes the
/// "open a new local topic" branch.
struct CrpEntry {
    int local = -1;
    double prob = 0.0;
};

/// p(local j) = n_uj(t) / (n_u.(t) + gamma), p(new) = gamma / (n_u.(t) + gamma).
std::vector<CrpEntry> crp_topic_predictive(const UserState& user, double t, double nu,
                                           double gamma);

/// One row of the shared network-level topic predictive. topic == kFreshTopic
/// encodes the brand-new-topic branch.
struct FranchiseEntry {
    TopicId topic = kFreshTopic;
    double prob = 0.0;
};

/// p(k) = m_k(t) / (zeta + m.(t)), p(fresh) = zeta / (zeta + m.(t)).
std::vector<FranchiseEntry> franchise_predictive(const std::vector<TopicAtom>& topics, double t,
                                                 double nu, double zeta);

/// Collapsed token-bag predictive under topic `atom` (nullptr = a fresh topic
/// with zero counts). Token order is ignored; the multinomial coefficient is
/// omitted, consistently across topics.
double doc_predictive(std::span<const TokenId> sorted_tokens, const TopicAtom* atom, double eta,
                      int V);

// ---------------------------------------------------------------------------
// Joint (trigger, topic) predictive: the SMC proposal.
// ---------------------------------------------------------------------------

/// One joint candidate for the next event's latent assignment.
/// trigger == kSelfTrigger means exogenous; topic == kFreshTopic means a
/// brand-new global topic (always with new_local).
struct Candidate {
    EventIndex trigger = kSelfTrigger;
    TopicId topic = kFreshTopic;
    bool new_local = false;
    double log_score = 0.0;
};

struct ScoreTable {
    std::vector<Candidate> candidates;
    double log_total = 0.0;     // logsumexp of the scores
    double log_marginal = 0.0;  // log_total minus the window compensator

    /// Normalized probabilities of the candidates.
    std::vector<double> probabilities() const;

    /// Draw a candidate index from the normalized table.
    std::size_t sample(std::mt19937_64& rng) const;
};

/// Unnormalized joint scores for every admissible (trigger, topic) pair of
/// the next event, plus the event's marginal log density under the cached
/// estimates. begin_event(e.time) must have been called on the state.
ScoreTable event_predictive(const ModelState& state, const Event& e);

/// Turn a sampled candidate into the record to append, assigning the next
/// free global topic id to the fresh-topic branch.
BranchingRecord to_record(const Candidate& c, const ModelState& state);

}  // namespace hnp3
