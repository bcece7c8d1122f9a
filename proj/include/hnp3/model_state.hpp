#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "hnp3/types.hpp"

namespace hnp3 {

enum class ModelMode {
    full,          // shared nonparametric topics with per-topic kernel rates
    single_topic,  // one forced global topic, documents ignored
};

/// Knobs of the incremental state that are not model constants.
struct StateOptions {
    ModelMode mode = ModelMode::full;
    int refresh_every = 10;      // cadence (in events) of rate/kernel re-estimation
    double truncation_w = 10.0;  // drop trigger candidates older than w * max(E[1/beta]); <= 0 disables
    bool times_only = false;     // permit empty documents outside single-topic mode
    // Consume the kernel-rate grid as a posterior mixture in the proposal
    // and compensators; the point-mean variant exists for the algebraic
    // oracle tests.
    bool beta_mixture = true;
};

/// A past event still eligible to trigger new ones.
struct ActiveSource {
    EventIndex index = 0;
    double time = 0.0;
    UserId user = 0;
    TopicId topic = 0;
};

/// All sufficient statistics of one latent-history hypothesis, maintained
/// incrementally: topic atoms, per-user tables, branching counts, cached
/// posterior-mean rates, and the per-topic kernel-rate importance grids.
///
/// The update protocol per event is begin_event(t) followed by exactly one
/// apply_record(event, record). Rebuilding a state by replaying a record
/// list reproduces every statistic bit for bit.
class ModelState {
public:
    ModelState(const Hyperparams& hp, const StateOptions& opt);

    // -- update protocol ------------------------------------------------
    void begin_event(double t);
    void apply_record(const Event& e, const BranchingRecord& r);

    // -- read access ----------------------------------------------------
    const Hyperparams& hyperparams() const { return hp_; }
    const StateOptions& options() const { return opt_; }
    const std::vector<TopicAtom>& topics() const { return topics_; }
    const std::vector<UserState>& users() const { return users_; }
    const std::deque<ActiveSource>& active_sources() const { return active_; }
    double t_last() const { return t_last_; }
    std::int64_t n_events() const { return n_events_; }

    /// Integrated total intensity over the window closed by the last
    /// begin_event call, using the cached rate estimates.
    double window_compensator() const { return window_compensator_; }

    /// Same integral for an arbitrary future window [a, b], a >= t_last.
    double compensator_window(double a, double b) const;

    /// Intensity of one user at t >= t_last under the cached estimates.
    double intensity(UserId u, double t) const;

    // -- cached estimates (refreshed every refresh_every events) ---------
    const RateEstimates& rates() const { return rates_; }
    double beta_hat(TopicId k) const { return beta_hat_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& beta_hats() const { return beta_hat_; }

    /// Triggering kernel of topic k at the given gap, under the cached
    /// kernel-rate posterior (mixture over the grid, or the point mean).
    double trigger_kernel(TopicId k, double gap) const;
    /// Integral of that kernel for a source at t_s over [a, b].
    double trigger_kernel_integral(TopicId k, double t_s, double a, double b) const;
    /// Expected total triggering mass per unit influence, E[1/beta].
    double expected_inv_beta(TopicId k) const;

    // -- estimators evaluated on demand ----------------------------------
    /// Conjugate posterior means of exogenous rates and influence weights
    /// given the branching counts, evaluated at t_now >= t_last.
    RateEstimates rate_estimates(double t_now) const;

    /// Self-normalized importance estimate of topic k's kernel rate.
    double beta_estimate(TopicId k) const;

    // -- bookkeeping counts ----------------------------------------------
    std::int64_t exo_count(UserId u) const { return exo_count_[static_cast<std::size_t>(u)]; }
    std::int64_t trigger_count(UserId source, UserId target) const {
        return trig_count_[static_cast<std::size_t>(source) * hp_.U + target];
    }

    /// Upper bound on triggering mass discarded by candidate truncation.
    double truncated_mass_bound() const { return truncated_mass_; }

private:
    void refresh_estimates();
    double prune_cutoff() const;
    TopicAtom make_topic(TopicId id) const;

    Hyperparams hp_;
    StateOptions opt_;

    std::vector<TopicAtom> topics_;
    std::vector<UserState> users_;
    std::deque<ActiveSource> active_;

    std::vector<std::int64_t> exo_count_;           // per user
    std::vector<std::int64_t> trig_count_;          // U*U, row = source
    std::vector<std::vector<std::int64_t>> retired_;  // [topic][user]: pruned sources

    RateEstimates rates_;
    std::vector<double> beta_hat_;        // per topic
    std::vector<std::vector<double>> beta_mix_;  // per topic: cached grid weights
    std::vector<double> inv_beta_;        // per topic: cached E[1/beta]
    std::vector<double> alpha_out_;       // per user: cached row sums of alpha

    double t_last_ = 0.0;
    std::int64_t n_events_ = 0;
    double window_compensator_ = 0.0;
    double pending_time_ = 0.0;
    bool window_open_ = false;
    double truncated_mass_ = 0.0;
};

}  // namespace hnp3
