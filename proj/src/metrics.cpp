#include "hnp3/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace hnp3 {

double relative_error(std::span<const double> est, std::span<const double> truth) {
    if (est.size() != truth.size()) {
        throw std::invalid_argument("relative_error: shape mismatch");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double d = est[i] - truth[i];
        num += d * d;
        den += truth[i] * truth[i];
    }
    if (den == 0.0) {
        throw std::invalid_argument("relative_error: truth is all zero");
    }
    return std::sqrt(num / den);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("adjusted_rand_index: length mismatch");
    }
    const std::size_t n = a.size();
    if (n < 2) return 1.0;

    std::map<std::pair<int, int>, std::int64_t> cells;
    std::map<int, std::int64_t> rows;
    std::map<int, std::int64_t> cols;
    for (std::size_t i = 0; i < n; ++i) {
        cells[{a[i], b[i]}] += 1;
        rows[a[i]] += 1;
        cols[b[i]] += 1;
    }
    auto choose2 = [](std::int64_t x) { return 0.5 * static_cast<double>(x) * (x - 1); };
    double sum_cells = 0.0;
    for (const auto& [key, count] : cells) sum_cells += choose2(count);
    double sum_rows = 0.0;
    for (const auto& [key, count] : rows) sum_rows += choose2(count);
    double sum_cols = 0.0;
    for (const auto& [key, count] : cols) sum_cols += choose2(count);
    const double total = choose2(static_cast<std::int64_t>(n));
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (sum_cells - expected) / (max_index - expected);
}

std::pair<double, double> bootstrap_mean_ci(std::span<const double> values, int n_resamples,
                                            double confidence, std::uint64_t seed) {
    if (values.empty()) {
        throw std::invalid_argument("bootstrap_mean_ci: no values");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("bootstrap_mean_ci: confidence must be in (0, 1)");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(static_cast<std::size_t>(n_resamples));
    for (auto& m : means) {
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) sum += values[pick(rng)];
        m = sum / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - confidence) / 2.0;
    const auto lo_idx = static_cast<std::size_t>(
        std::floor(tail * static_cast<double>(n_resamples - 1)));
    const auto hi_idx = static_cast<std::size_t>(
        std::ceil((1.0 - tail) * static_cast<double>(n_resamples - 1)));
    return {means[lo_idx], means[hi_idx]};
}

std::vector<PredictionRow> next_event_time_loglik(ParticleFilter& filter,
                                                  std::span<const Event> held_out,
                                                  std::int64_t horizon) {
    const std::int64_t count =
        horizon < 0 ? static_cast<std::int64_t>(held_out.size())
                    : std::min<std::int64_t>(horizon, static_cast<std::int64_t>(held_out.size()));
    if (horizon >= 0 && count < horizon) {
        throw std::invalid_argument("next_event_time_loglik: not enough held-out events");
    }
    std::vector<PredictionRow> rows;
    rows.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        const Event& e = held_out[static_cast<std::size_t>(i)];
        if (i > 0 && !(e.time > held_out[static_cast<std::size_t>(i - 1)].time)) {
            throw std::invalid_argument("next_event_time_loglik: held-out times not increasing");
        }
        const double t_prev = filter.t_last();
        const std::vector<double> weights = filter.normalized_weights();
        double max_term = -std::numeric_limits<double>::infinity();
        std::vector<double> terms(weights.size(),
                                  -std::numeric_limits<double>::infinity());
        for (std::size_t p = 0; p < weights.size(); ++p) {
            if (weights[p] <= 0.0) continue;
            const ModelState& state = filter.particles()[p].state;
            const double log_lambda = std::log(state.intensity(e.user, e.time));
            const double comp = state.compensator_window(t_prev, e.time);
            terms[p] = std::log(weights[p]) + log_lambda - comp;
            max_term = std::max(max_term, terms[p]);
        }
        double sum = 0.0;
        for (double term : terms) {
            if (std::isfinite(term)) sum += std::exp(term - max_term);
        }
        rows.push_back(PredictionRow{filter.n_observed(), e.time, e.user,
                                     max_term + std::log(sum)});
        filter.observe(e);
    }
    return rows;
}

}  // namespace hnp3
