#include "hnp3/model_state.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hnp3/kernel.hpp"
#include "hnp3/log.hpp"

namespace hnp3 {

ModelState::ModelState(const Hyperparams& hp, const StateOptions& opt)
    : hp_(hp), opt_(opt) {
    hp_.validate();
    users_.resize(static_cast<std::size_t>(hp_.U));
    exo_count_.assign(static_cast<std::size_t>(hp_.U), 0);
    trig_count_.assign(static_cast<std::size_t>(hp_.U) * hp_.U, 0);

    rates_ = RateEstimates(hp_.U);
    const double mu0 = hp_.mu_prior.mean();
    const double a0 = hp_.alpha_prior.mean();
    for (int u = 0; u < hp_.U; ++u) {
        rates_.mu[static_cast<std::size_t>(u)] = mu0;
        for (int v = 0; v < hp_.U; ++v) rates_.alpha_at(u, v) = a0;
    }
    alpha_out_.assign(static_cast<std::size_t>(hp_.U), a0 * hp_.U);
}

TopicAtom ModelState::make_topic(TopicId id) const {
    TopicAtom atom;
    atom.id = id;
    atom.word_counts.assign(static_cast<std::size_t>(hp_.V), 0.0);
    atom.total_count = 0.0;
    atom.event_count = 0;
    atom.beta_samples.resize(static_cast<std::size_t>(hp_.M));
    atom.beta_log_weights.assign(static_cast<std::size_t>(hp_.M), 0.0);
    // Stratified prior grid: midpoint quantiles of the Gamma prior, the
    // same for every topic and particle.
    const boost::math::gamma_distribution<double> prior(hp_.beta_prior.shape,
                                                        1.0 / hp_.beta_prior.rate);
    for (int m = 0; m < hp_.M; ++m) {
        const double q = (m + 0.5) / hp_.M;
        atom.beta_samples[static_cast<std::size_t>(m)] = boost::math::quantile(prior, q);
    }
    return atom;
}

double ModelState::trigger_kernel(TopicId k, double gap) const {
    if (!opt_.beta_mixture) {
        return std::exp(-beta_hat_[static_cast<std::size_t>(k)] * gap);
    }
    const auto& atom = topics_[static_cast<std::size_t>(k)];
    const auto& w = beta_mix_[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        sum += w[m] * std::exp(-atom.beta_samples[m] * gap);
    }
    return sum;
}

double ModelState::trigger_kernel_integral(TopicId k, double t_s, double a, double b) const {
    if (!opt_.beta_mixture) {
        return kernel_integral(beta_hat_[static_cast<std::size_t>(k)], t_s, a, b);
    }
    const auto& atom = topics_[static_cast<std::size_t>(k)];
    const auto& w = beta_mix_[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        sum += w[m] * kernel_integral(atom.beta_samples[m], t_s, a, b);
    }
    return sum;
}

double ModelState::expected_inv_beta(TopicId k) const {
    if (!opt_.beta_mixture) return 1.0 / beta_hat_[static_cast<std::size_t>(k)];
    return inv_beta_[static_cast<std::size_t>(k)];
}

double ModelState::prune_cutoff() const {
    if (opt_.truncation_w <= 0.0 || topics_.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    double slowest = 0.0;
    for (std::size_t k = 0; k < topics_.size(); ++k) {
        slowest = std::max(slowest, expected_inv_beta(static_cast<TopicId>(k)));
    }
    return opt_.truncation_w * slowest;
}

void ModelState::begin_event(double t) {
    if (window_open_) {
        throw std::logic_error("begin_event called twice without apply_record");
    }
    if (t < t_last_ || (n_events_ > 0 && t <= t_last_)) {
        throw std::invalid_argument("event times must be strictly increasing");
    }
    const double t_prev = t_last_;

    // Survival part of the window for the particle weight, and the matching
    // per-sample survival terms of each topic's kernel-rate grid.
    double comp = 0.0;
    for (double m : rates_.mu) comp += m;
    comp *= (t - t_prev);
    for (const ActiveSource& s : active_) {
        const double out = alpha_out_[static_cast<std::size_t>(s.user)];
        comp += out * trigger_kernel_integral(s.topic, s.time, t_prev, t);
        auto& atom = topics_[static_cast<std::size_t>(s.topic)];
        for (int m = 0; m < hp_.M; ++m) {
            atom.beta_log_weights[static_cast<std::size_t>(m)] -=
                out * kernel_integral(atom.beta_samples[static_cast<std::size_t>(m)], s.time, t_prev, t);
        }
    }
    window_compensator_ = comp;

    const double cutoff = prune_cutoff();
    const double inf = std::numeric_limits<double>::infinity();
    while (!active_.empty() && t - active_.front().time > cutoff) {
        const ActiveSource& s = active_.front();
        truncated_mass_ += alpha_out_[static_cast<std::size_t>(s.user)] *
                           trigger_kernel_integral(s.topic, s.time, t, inf);
        retired_[static_cast<std::size_t>(s.topic)][static_cast<std::size_t>(s.user)] += 1;
        active_.pop_front();
    }

    t_last_ = t;
    pending_time_ = t;
    window_open_ = true;
}

void ModelState::apply_record(const Event& e, const BranchingRecord& r) {
    if (!window_open_ || e.time != pending_time_) {
        throw std::logic_error("apply_record must follow begin_event for the same time");
    }
    window_open_ = false;

    if (e.user < 0 || e.user >= hp_.U) {
        throw std::invalid_argument("event user out of range");
    }
    for (TokenId w : e.tokens) {
        if (w < 0 || w >= hp_.V) {
            throw std::invalid_argument("event token out of vocabulary range");
        }
    }

    TopicId z = r.topic;
    if (r.exogenous()) {
        if (r.new_local) {
            if (z == static_cast<TopicId>(topics_.size())) {
                topics_.push_back(make_topic(z));
                retired_.emplace_back(static_cast<std::size_t>(hp_.U), 0);
                beta_hat_.push_back(beta_estimate(z));
                beta_mix_.emplace_back(static_cast<std::size_t>(hp_.M), 1.0 / hp_.M);
                double inv = 0.0;
                for (double b : topics_.back().beta_samples) inv += 1.0 / b;
                inv_beta_.push_back(inv / hp_.M);
            } else if (z < 0 || z > static_cast<TopicId>(topics_.size())) {
                throw std::invalid_argument("record topic id out of range");
            }
            topics_[static_cast<std::size_t>(z)].franchise.bump(e.time, hp_.nu, 1.0);
        } else if (z < 0 || z >= static_cast<TopicId>(topics_.size())) {
            throw std::invalid_argument("record topic id out of range");
        }

        auto& user = users_[static_cast<std::size_t>(e.user)];
        if (auto* local = user.find(z)) {
            local->usage.bump(e.time, hp_.nu, 1.0);
        } else {
            if (!r.new_local && opt_.mode == ModelMode::full) {
                throw std::invalid_argument("record reuses a local topic the user never opened");
            }
            UserState::LocalTopic lt;
            lt.topic = z;
            lt.usage.bump(e.time, hp_.nu, 1.0);
            user.local_topics.push_back(lt);
        }
        user.exo_event_count += 1;
        exo_count_[static_cast<std::size_t>(e.user)] += 1;
    } else {
        if (r.new_local) {
            throw std::invalid_argument("triggered events cannot open a local topic");
        }
        const ActiveSource* src = nullptr;
        for (const ActiveSource& s : active_) {
            if (s.index == r.trigger) {
                src = &s;
                break;
            }
        }
        if (src == nullptr) {
            throw std::invalid_argument("record trigger is not an eligible source event");
        }
        if (src->topic != z) {
            throw std::invalid_argument("triggered event must inherit its source topic");
        }
        trig_count_[static_cast<std::size_t>(src->user) * hp_.U + e.user] += 1;
        auto& atom = topics_[static_cast<std::size_t>(z)];
        const double gap = e.time - src->time;
        for (int m = 0; m < hp_.M; ++m) {
            atom.beta_log_weights[static_cast<std::size_t>(m)] -=
                atom.beta_samples[static_cast<std::size_t>(m)] * gap;
        }
    }

    auto& atom = topics_[static_cast<std::size_t>(z)];
    for (TokenId w : e.tokens) {
        atom.word_counts[static_cast<std::size_t>(w)] += 1.0;
    }
    atom.total_count += static_cast<double>(e.tokens.size());
    atom.event_count += 1;

    active_.push_back(ActiveSource{n_events_, e.time, e.user, z});
    n_events_ += 1;

    if (opt_.refresh_every > 0 && n_events_ % opt_.refresh_every == 0) {
        refresh_estimates();
    }
}

void ModelState::refresh_estimates() {
    for (std::size_t k = 0; k < topics_.size(); ++k) {
        auto& atom = topics_[k];
        double max_lw = atom.beta_log_weights[0];
        for (double lw : atom.beta_log_weights) max_lw = std::max(max_lw, lw);
        for (double& lw : atom.beta_log_weights) lw -= max_lw;
        beta_hat_[k] = beta_estimate(static_cast<TopicId>(k));
        double wsum = 0.0;
        for (int m = 0; m < hp_.M; ++m) {
            beta_mix_[k][static_cast<std::size_t>(m)] =
                std::exp(atom.beta_log_weights[static_cast<std::size_t>(m)]);
            wsum += beta_mix_[k][static_cast<std::size_t>(m)];
        }
        double inv = 0.0;
        for (int m = 0; m < hp_.M; ++m) {
            beta_mix_[k][static_cast<std::size_t>(m)] /= wsum;
            inv += beta_mix_[k][static_cast<std::size_t>(m)] /
                   atom.beta_samples[static_cast<std::size_t>(m)];
        }
        inv_beta_[k] = inv;
    }
    rates_ = rate_estimates(t_last_);
    for (int u = 0; u < hp_.U; ++u) {
        alpha_out_[static_cast<std::size_t>(u)] = rates_.alpha_row_sum(u);
    }
    if (truncated_mass_ > 0.0) {
        log::debug("truncated trigger mass bound so far: ", truncated_mass_);
    }
}

RateEstimates ModelState::rate_estimates(double t_now) const {
    if (t_now < t_last_) {
        throw std::domain_error("rate_estimates: t_now precedes the last event");
    }
    RateEstimates est(hp_.U);
    for (int u = 0; u < hp_.U; ++u) {
        est.mu[static_cast<std::size_t>(u)] =
            (hp_.mu_prior.shape + static_cast<double>(exo_count_[static_cast<std::size_t>(u)])) /
            (hp_.mu_prior.rate + t_now);
    }
    // Integrated-kernel exposure of each source user. Sources pruned from
    // the candidate set contribute their full expected mass E[1/beta].
    std::vector<double> exposure(static_cast<std::size_t>(hp_.U), 0.0);
    for (std::size_t k = 0; k < topics_.size(); ++k) {
        const double mass = expected_inv_beta(static_cast<TopicId>(k));
        for (int u = 0; u < hp_.U; ++u) {
            const auto n = retired_[k][static_cast<std::size_t>(u)];
            if (n > 0) exposure[static_cast<std::size_t>(u)] += static_cast<double>(n) * mass;
        }
    }
    for (const ActiveSource& s : active_) {
        exposure[static_cast<std::size_t>(s.user)] +=
            trigger_kernel_integral(s.topic, s.time, s.time, t_now);
    }
    for (int v = 0; v < hp_.U; ++v) {
        const double denom = hp_.alpha_prior.rate + exposure[static_cast<std::size_t>(v)];
        for (int u = 0; u < hp_.U; ++u) {
            est.alpha_at(v, u) =
                (hp_.alpha_prior.shape +
                 static_cast<double>(trig_count_[static_cast<std::size_t>(v) * hp_.U + u])) /
                denom;
        }
    }
    return est;
}

double ModelState::beta_estimate(TopicId k) const {
    if (k < 0 || k > static_cast<TopicId>(topics_.size())) {
        throw std::invalid_argument("beta_estimate: unknown topic");
    }
    // A topic being created has its grid built but is not stored yet; the
    // equal-weight mean of the grid is the prior estimate.
    if (k == static_cast<TopicId>(topics_.size())) {
        const TopicAtom atom = make_topic(k);
        double sum = 0.0;
        for (double b : atom.beta_samples) sum += b;
        return sum / static_cast<double>(atom.beta_samples.size());
    }
    const auto& atom = topics_[static_cast<std::size_t>(k)];
    double max_lw = atom.beta_log_weights[0];
    for (double lw : atom.beta_log_weights) max_lw = std::max(max_lw, lw);
    double wsum = 0.0;
    double bsum = 0.0;
    for (std::size_t m = 0; m < atom.beta_samples.size(); ++m) {
        const double w = std::exp(atom.beta_log_weights[m] - max_lw);
        wsum += w;
        bsum += w * atom.beta_samples[m];
    }
    return bsum / wsum;
}

double ModelState::intensity(UserId u, double t) const {
    if (t < t_last_) {
        throw std::domain_error("intensity: t precedes the last event");
    }
    double lambda = rates_.mu[static_cast<std::size_t>(u)];
    for (const ActiveSource& s : active_) {
        lambda += rates_.alpha_at(s.user, u) * trigger_kernel(s.topic, t - s.time);
    }
    return lambda;
}

double ModelState::compensator_window(double a, double b) const {
    if (a > b) throw std::domain_error("compensator_window: interval start exceeds end");
    double comp = 0.0;
    for (double m : rates_.mu) comp += m;
    comp *= (b - a);
    for (const ActiveSource& s : active_) {
        comp += alpha_out_[static_cast<std::size_t>(s.user)] *
                trigger_kernel_integral(s.topic, s.time, a, b);
    }
    return comp;
}

}  // namespace hnp3
