#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnp3 {

using TokenId = std::int32_t;
using UserId = std::int32_t;
using TopicId = std::int32_t;
using EventIndex = std::int64_t;

/// Marks an exogenous event in a BranchingRecord.
inline constexpr EventIndex kSelfTrigger = -1;
/// Marks the "brand new topic" branch of the shared topic distribution.
inline constexpr TopicId kFreshTopic = -1;

/// One observation: a user publishes a bag of tokens at a point in time.
/// Tokens are kept sorted so the bag has a canonical representation.
struct Event {
    double time = 0.0;
    UserId user = 0;
    std::vector<TokenId> tokens;

    Event() = default;
    Event(double t, UserId u, std::vector<TokenId> w)
        : time(t), user(u), tokens(std::move(w)) {
        if (!(time >= 0.0) || !std::isfinite(time)) {
            throw std::invalid_argument("event time must be finite and non-negative");
        }
        if (user < 0) {
            throw std::invalid_argument("event user id must be non-negative");
        }
        std::sort(tokens.begin(), tokens.end());
    }

    bool operator==(const Event&) const = default;
};

struct GammaPrior {
    double shape = 1.0;
    double rate = 1.0;

    double mean() const { return shape / rate; }
};

/// Fixed model constants shared by simulation and inference.
struct Hyperparams {
    double gamma = 1.0;   // new-local-topic concentration
    double zeta = 1.0;    // new-global-topic concentration
    double nu = 0.01;     // decay rate of the recurrent counts
    double eta = 0.5;     // symmetric Dirichlet concentration over tokens
    GammaPrior beta_prior{2.0, 2.0};
    GammaPrior mu_prior{0.5, 10.0};
    GammaPrior alpha_prior{0.5, 20.0};
    int M = 32;           // kernel-rate importance samples per topic
    int P = 8;            // particles
    int U = 1;            // users
    int V = 1;            // vocabulary size

    void validate() const {
        auto positive = [](double x, const char* name) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw std::invalid_argument(std::string(name) + " must be strictly positive");
            }
        };
        positive(gamma, "gamma");
        positive(zeta, "zeta");
        positive(eta, "eta");
        if (!(nu >= 0.0) || !std::isfinite(nu)) {
            throw std::invalid_argument("nu must be finite and non-negative");
        }
        positive(beta_prior.shape, "beta_prior.shape");
        positive(beta_prior.rate, "beta_prior.rate");
        positive(mu_prior.shape, "mu_prior.shape");
        positive(mu_prior.rate, "mu_prior.rate");
        positive(alpha_prior.shape, "alpha_prior.shape");
        positive(alpha_prior.rate, "alpha_prior.rate");
        if (M < 1) throw std::invalid_argument("M must be >= 1");
        if (P < 1) throw std::invalid_argument("P must be >= 1");
        if (U < 1) throw std::invalid_argument("U must be >= 1");
        if (V < 1) throw std::invalid_argument("V must be >= 1");
    }
};

/// Exponentially decayed count, stored lazily as (value at anchor, anchor time).
/// Decay composes exactly, so bumping re-anchors without losing information.
struct DecayedCounter {
    double value = 0.0;
    double anchor = 0.0;

    double read(double t, double nu) const {
        if (t < anchor) {
            throw std::domain_error("DecayedCounter read before its anchor time");
        }
        if (value == 0.0) return 0.0;
        return value * std::exp(-nu * (t - anchor));
    }

    void bump(double t, double nu, double amount) {
        value = read(t, nu) + amount;
        anchor = t;
    }
};

/// Latent assignment of one event: its trigger, its topic, and whether the
/// topic was drawn from the shared network-level distribution.
struct BranchingRecord {
    EventIndex trigger = kSelfTrigger;
    TopicId topic = 0;
    bool new_local = false;

    bool exogenous() const { return trigger == kSelfTrigger; }

    bool operator==(const BranchingRecord&) const = default;
};

/// A global topic: collapsed token counts, decayed network popularity, and
/// the importance grid for its kernel rate.
struct TopicAtom {
    TopicId id = 0;
    std::vector<double> word_counts;   // length V
    double total_count = 0.0;
    DecayedCounter franchise;          // decayed number of shared-draw selections
    std::vector<double> beta_samples;      // length M, all > 0
    std::vector<double> beta_log_weights;  // length M
    std::int64_t event_count = 0;
};

/// Per-user table of topics the user has drawn exogenously, with decayed
/// usage counts. A topic appears at most once per user.
struct UserState {
    struct LocalTopic {
        TopicId topic = 0;
        DecayedCounter usage;
    };
    std::vector<LocalTopic> local_topics;
    std::int64_t exo_event_count = 0;

    const LocalTopic* find(TopicId k) const {
        for (const auto& lt : local_topics) {
            if (lt.topic == k) return &lt;
        }
        return nullptr;
    }
    LocalTopic* find(TopicId k) {
        for (auto& lt : local_topics) {
            if (lt.topic == k) return &lt;
        }
        return nullptr;
    }

    double total_usage(double t, double nu) const {
        double sum = 0.0;
        for (const auto& lt : local_topics) sum += lt.usage.read(t, nu);
        return sum;
    }
};

/// Posterior-mean exogenous rates and influence weights, row = source user.
struct RateEstimates {
    int U = 0;
    std::vector<double> mu;     // length U
    std::vector<double> alpha;  // U*U row-major, alpha[v*U + u] = influence of v on u

    RateEstimates() = default;
    explicit RateEstimates(int n_users)
        : U(n_users), mu(static_cast<std::size_t>(n_users), 0.0),
          alpha(static_cast<std::size_t>(n_users) * n_users, 0.0) {}

    double alpha_at(UserId source, UserId target) const {
        return alpha[static_cast<std::size_t>(source) * U + target];
    }
    double& alpha_at(UserId source, UserId target) {
        return alpha[static_cast<std::size_t>(source) * U + target];
    }
    double alpha_row_sum(UserId source) const {
        double s = 0.0;
        for (int u = 0; u < U; ++u) s += alpha_at(source, u);
        return s;
    }
};

}  // namespace hnp3
