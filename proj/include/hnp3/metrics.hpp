#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hnp3/inference.hpp"
#include "hnp3/types.hpp"

namespace hnp3 {

/// Frobenius norm of (est - truth) divided by the Frobenius norm of truth.
/// Shapes are the caller's responsibility; an all-zero truth is an error.
double relative_error(std::span<const double> est, std::span<const double> truth);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Percentile bootstrap confidence interval for the mean of `values`.
std::pair<double, double> bootstrap_mean_ci(std::span<const double> values, int n_resamples,
                                            double confidence, std::uint64_t seed);

struct PredictionRow {
    std::int64_t index = 0;  // absolute position in the stream
    double time = 0.0;
    UserId user = 0;
    double log_density = 0.0;  // log f*(t_i, u_i) under the filter mixture
};

/// Rolling one-step-ahead scoring: each held-out event is scored under the
/// current filter mixture (intensity at its time and user minus the total
/// compensator since the previous event), then folded into the filter.
std::vector<PredictionRow> next_event_time_loglik(ParticleFilter& filter,
                                                  std::span<const Event> held_out,
                                                  std::int64_t horizon = -1);

}  // namespace hnp3
