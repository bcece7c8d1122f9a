#include "hnp3/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hnp3/log.hpp"

namespace hnp3 {

namespace {

struct TopicRuntime {
    double beta = 0.0;
    std::vector<double> phi;
    DecayedCounter franchise;
    // sources of this topic, for trigger attribution
    std::vector<std::size_t> events;
};

std::vector<double> sample_dirichlet(int V, double eta, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(eta, 1.0);
    std::vector<double> phi(static_cast<std::size_t>(V));
    double total = 0.0;
    for (auto& x : phi) {
        x = gamma(rng);
        total += x;
    }
    if (total <= 0.0) {
        // Extremely small eta can underflow every draw; fall back to uniform.
        std::fill(phi.begin(), phi.end(), 1.0 / V);
        return phi;
    }
    for (auto& x : phi) x /= total;
    return phi;
}

std::size_t pick_index(const std::vector<double>& weights, double total,
                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace

double branching_bound(const std::vector<double>& alpha, int U, double beta_min) {
    if (U == 0 || beta_min <= 0.0) return 0.0;
    // Power iteration on the non-negative matrix alpha / beta_min.
    std::vector<double> x(static_cast<std::size_t>(U), 1.0);
    double radius = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> y(static_cast<std::size_t>(U), 0.0);
        for (int v = 0; v < U; ++v) {
            for (int u = 0; u < U; ++u) {
                y[static_cast<std::size_t>(u)] +=
                    alpha[static_cast<std::size_t>(v) * U + u] / beta_min *
                    x[static_cast<std::size_t>(v)];
            }
        }
        double norm = 0.0;
        for (double val : y) norm = std::max(norm, val);
        if (norm == 0.0) return 0.0;
        for (double& val : y) val /= norm;
        x = std::move(y);
        radius = norm;
    }
    return radius;
}

SimResult simulate(const Hyperparams& hp, const std::vector<double>& mu,
                   const std::vector<double>& alpha,
                   const std::optional<TopicTruthSpec>& topic_spec, const SimOptions& opt,
                   std::uint64_t seed) {
    hp.validate();
    const int U = hp.U;
    if (static_cast<int>(mu.size()) != U) {
        throw std::invalid_argument("simulate: mu must have one entry per user");
    }
    if (static_cast<int>(alpha.size()) != U * U) {
        throw std::invalid_argument("simulate: alpha must be a U x U matrix");
    }
    for (double m : mu) {
        if (!(m >= 0.0) || !std::isfinite(m)) {
            throw std::invalid_argument("simulate: mu entries must be finite and non-negative");
        }
    }
    for (double a : alpha) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw std::invalid_argument("simulate: alpha entries must be finite and non-negative");
        }
    }
    if (topic_spec) {
        if (topic_spec->beta.empty() || topic_spec->beta.size() != topic_spec->phi.size()) {
            throw std::invalid_argument("simulate: topic pool needs matching beta and phi");
        }
        for (double b : topic_spec->beta) {
            if (!(b > 0.0)) throw std::invalid_argument("simulate: beta must be positive");
        }
        for (const auto& row : topic_spec->phi) {
            if (static_cast<int>(row.size()) != hp.V) {
                throw std::invalid_argument("simulate: phi rows must have length V");
            }
            double sum = 0.0;
            for (double p : row) sum += p;
            if (std::abs(sum - 1.0) > 1e-12) {
                throw std::invalid_argument("simulate: phi rows must sum to one");
            }
        }
    }
    if (std::isinf(opt.horizon) && opt.target_events < 0) {
        throw std::invalid_argument("simulate: need a horizon or a target event count");
    }

    double beta_min_known = std::numeric_limits<double>::infinity();
    if (topic_spec) {
        for (double b : topic_spec->beta) beta_min_known = std::min(beta_min_known, b);
    }
    const double bound = std::isfinite(beta_min_known)
                             ? branching_bound(alpha, U, beta_min_known)
                             : 0.0;
    if (bound >= 1.0) {
        log::warn("branching bound ", bound, " >= 1: the process may be supercritical");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SimResult result;
    std::vector<TopicRuntime> topics;

    // Per-(user, topic) triggered intensity, decayed in closed form.
    std::vector<std::vector<double>> excite(static_cast<std::size_t>(U));

    std::vector<UserState> users(static_cast<std::size_t>(U));
    std::vector<double> lambda(static_cast<std::size_t>(U), 0.0);

    auto total_intensity = [&](double) {
        double sum = 0.0;
        for (int u = 0; u < U; ++u) {
            double l = mu[static_cast<std::size_t>(u)];
            for (double s : excite[static_cast<std::size_t>(u)]) l += s;
            lambda[static_cast<std::size_t>(u)] = l;
            sum += l;
        }
        return sum;
    };

    auto open_topic = [&]() -> TopicId {
        TopicRuntime topic;
        if (opt.topicless) {
            topic.beta = hp.beta_prior.mean();
            topic.phi.assign(static_cast<std::size_t>(hp.V), 1.0 / hp.V);
        } else {
            std::gamma_distribution<double> gamma(hp.beta_prior.shape, 1.0 / hp.beta_prior.rate);
            topic.beta = gamma(rng);
            topic.phi = sample_dirichlet(hp.V, hp.eta, rng);
        }
        topics.push_back(std::move(topic));
        for (int u = 0; u < U; ++u) excite[static_cast<std::size_t>(u)].push_back(0.0);
        return static_cast<TopicId>(topics.size() - 1);
    };

    if (topic_spec) {
        // The whole pool is addressable from the start, with zero trend mass.
        for (std::size_t k = 0; k < topic_spec->beta.size(); ++k) {
            TopicRuntime topic;
            topic.beta = topic_spec->beta[k];
            topic.phi = topic_spec->phi[k];
            topics.push_back(std::move(topic));
        }
        for (int u = 0; u < U; ++u) {
            excite[static_cast<std::size_t>(u)].assign(topics.size(), 0.0);
        }
    }

    double t = 0.0;
    std::int64_t n = 0;
    while (true) {
        const double lambda_bar = total_intensity(t);
        if (!(lambda_bar > 0.0)) break;  // nothing can ever fire again
        std::exponential_distribution<double> expo(lambda_bar);
        const double wait = expo(rng);
        const double t_next = t + wait;
        if (t_next > opt.horizon) break;

        // Decay the excitation state to the candidate time.
        for (std::size_t k = 0; k < topics.size(); ++k) {
            const double factor = std::exp(-topics[k].beta * wait);
            for (int u = 0; u < U; ++u) excite[static_cast<std::size_t>(u)][k] *= factor;
        }
        t = t_next;
        const double lambda_new = total_intensity(t);
        if (unif(rng) > lambda_new / lambda_bar) continue;  // thinned

        // Accepted: attribute the event.
        const std::size_t user =
            pick_index(lambda, lambda_new, rng);
        const UserId u = static_cast<UserId>(user);

        BranchingRecord record;
        TopicId z;
        const double lambda_u = lambda[user];
        std::vector<double> parts;
        parts.reserve(topics.size() + 1);
        parts.push_back(mu[user]);
        for (double s : excite[user]) parts.push_back(s);
        const std::size_t component = pick_index(parts, lambda_u, rng);

        if (component == 0) {
            // Exogenous: choose the topic through the two-level predictive.
            record.trigger = kSelfTrigger;
            if (opt.topicless) {
                record.new_local = topics.empty();
                z = topics.empty() ? open_topic() : 0;
            } else {
                auto& state = users[user];
                const double n_total = state.total_usage(t, hp.nu);
                std::vector<double> weights;
                weights.reserve(state.local_topics.size() + 1);
                for (const auto& lt : state.local_topics) {
                    weights.push_back(lt.usage.read(t, hp.nu));
                }
                weights.push_back(hp.gamma);
                const std::size_t pick = pick_index(weights, n_total + hp.gamma, rng);
                if (pick < state.local_topics.size()) {
                    record.new_local = false;
                    z = state.local_topics[pick].topic;
                } else {
                    record.new_local = true;
                    // Shared draw: trending mass plus the base measure, which
                    // is the finite pool in explicit mode and a brand-new
                    // topic otherwise.
                    std::vector<double> shared;
                    shared.reserve(topics.size() + 1);
                    double m_total = 0.0;
                    for (const auto& topic : topics) {
                        const double m = topic.franchise.read(t, hp.nu);
                        shared.push_back(m);
                        m_total += m;
                    }
                    if (topic_spec) {
                        for (auto& w : shared) w += hp.zeta / static_cast<double>(topics.size());
                    } else {
                        shared.push_back(hp.zeta);
                    }
                    const double denom = m_total + hp.zeta;
                    const std::size_t kpick = pick_index(shared, denom, rng);
                    z = kpick < topics.size() ? static_cast<TopicId>(kpick) : open_topic();
                    topics[static_cast<std::size_t>(z)].franchise.bump(t, hp.nu, 1.0);
                }
                if (auto* local = state.find(z)) {
                    local->usage.bump(t, hp.nu, 1.0);
                } else {
                    UserState::LocalTopic lt;
                    lt.topic = z;
                    lt.usage.bump(t, hp.nu, 1.0);
                    state.local_topics.push_back(lt);
                }
                state.exo_event_count += 1;
            }
        } else {
            // Triggered: pick the source event within the chosen topic block.
            const std::size_t k = component - 1;
            const auto& sources = topics[k].events;
            std::vector<double> weights;
            weights.reserve(sources.size());
            double total = 0.0;
            for (const std::size_t e : sources) {
                const double w = alpha[static_cast<std::size_t>(result.events[e].user) * U + u] *
                                 std::exp(-topics[k].beta * (t - result.events[e].time));
                weights.push_back(w);
                total += w;
            }
            if (total <= 0.0) {
                throw std::runtime_error("simulate: triggered component without viable source");
            }
            const std::size_t source = sources[pick_index(weights, total, rng)];
            record.trigger = static_cast<EventIndex>(source);
            record.new_local = false;
            z = result.truth.records[source].topic;
        }
        record.topic = z;

        // Document.
        std::vector<TokenId> tokens;
        if (!opt.topicless && opt.doc_mean_len > 0.0) {
            std::poisson_distribution<int> length_dist(opt.doc_mean_len);
            int len = 0;
            do {
                len = length_dist(rng);
            } while (len < 1);
            tokens.reserve(static_cast<std::size_t>(len));
            const auto& phi = topics[static_cast<std::size_t>(z)].phi;
            std::discrete_distribution<int> token_dist(phi.begin(), phi.end());
            for (int i = 0; i < len; ++i) {
                tokens.push_back(static_cast<TokenId>(token_dist(rng)));
            }
        }

        const std::size_t index = result.events.size();
        result.events.emplace_back(t, u, std::move(tokens));
        result.truth.records.push_back(record);
        topics[static_cast<std::size_t>(z)].events.push_back(index);
        for (int target = 0; target < U; ++target) {
            excite[static_cast<std::size_t>(target)][static_cast<std::size_t>(z)] +=
                alpha[static_cast<std::size_t>(u) * U + target];
        }
        n += 1;
        if (opt.target_events >= 0 && n >= opt.target_events) break;
        if (n >= opt.event_cap) {
            throw std::runtime_error(
                "simulate: event cap reached (" + std::to_string(opt.event_cap) +
                "); the configuration is likely supercritical (branching bound " +
                std::to_string(bound) + ")");
        }
    }

    result.truth.mu = mu;
    result.truth.alpha = alpha;
    if (topic_spec) {
        result.truth.beta = topic_spec->beta;
        result.truth.phi = topic_spec->phi;
    } else {
        for (const auto& topic : topics) {
            result.truth.beta.push_back(topic.beta);
            result.truth.phi.push_back(topic.phi);
        }
    }
    double beta_min = std::numeric_limits<double>::infinity();
    for (double b : result.truth.beta) beta_min = std::min(beta_min, b);
    result.truth.branching_bound =
        std::isfinite(beta_min) ? branching_bound(alpha, U, beta_min) : 0.0;
    result.t_end = std::isfinite(opt.horizon) ? opt.horizon : t;
    return result;
}

}  // namespace hnp3
