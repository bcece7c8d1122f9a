#include "hnp3/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hnp3/kernel.hpp"

namespace hnp3 {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double trigger_component(const Event& source, TopicId source_topic, UserId target, double t,
                         const RateEstimates& rates, std::span<const double> betas) {
    if (source_topic < 0 || static_cast<std::size_t>(source_topic) >= betas.size()) {
        throw std::invalid_argument("trigger_component: unknown topic id");
    }
    return rates.alpha_at(source.user, target) *
           kernel_eval(betas[static_cast<std::size_t>(source_topic)], t, source.time);
}

double user_intensity(UserId target, double t, std::span<const Event> events,
                      std::span<const BranchingRecord> records, const RateEstimates& rates,
                      std::span<const double> betas) {
    double lambda = rates.mu[static_cast<std::size_t>(target)];
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].time >= t) break;
        lambda += trigger_component(events[i], records[i].topic, target, t, rates, betas);
    }
    return lambda;
}

double compensator(UserId target, double a, double b, std::span<const Event> events,
                   std::span<const BranchingRecord> records, const RateEstimates& rates,
                   std::span<const double> betas) {
    if (a > b) throw std::domain_error("compensator: interval start exceeds end");
    double total = rates.mu[static_cast<std::size_t>(target)] * (b - a);
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].time >= b) break;
        total += rates.alpha_at(events[i].user, target) *
                 kernel_integral(betas[static_cast<std::size_t>(records[i].topic)],
                                 events[i].time, a, b);
    }
    return total;
}

std::vector<CrpEntry> crp_topic_predictive(const UserState& user, double t, double nu,
                                           double gamma) {
    std::vector<CrpEntry> out;
    out.reserve(user.local_topics.size() + 1);
    double total = gamma;
    std::vector<double> reads(user.local_topics.size());
    for (std::size_t j = 0; j < user.local_topics.size(); ++j) {
        reads[j] = user.local_topics[j].usage.read(t, nu);
        total += reads[j];
    }
    for (std::size_t j = 0; j < user.local_topics.size(); ++j) {
        out.push_back(CrpEntry{static_cast<int>(j), reads[j] / total});
    }
    out.push_back(CrpEntry{-1, gamma / total});
    return out;
}

std::vector<FranchiseEntry> franchise_predictive(const std::vector<TopicAtom>& topics, double t,
                                                 double nu, double zeta) {
    std::vector<FranchiseEntry> out;
    out.reserve(topics.size() + 1);
    double total = zeta;
    std::vector<double> reads(topics.size());
    for (std::size_t k = 0; k < topics.size(); ++k) {
        reads[k] = topics[k].franchise.read(t, nu);
        total += reads[k];
    }
    for (std::size_t k = 0; k < topics.size(); ++k) {
        out.push_back(FranchiseEntry{static_cast<TopicId>(k), reads[k] / total});
    }
    out.push_back(FranchiseEntry{kFreshTopic, zeta / total});
    return out;
}

double doc_predictive(std::span<const TokenId> tokens, const TopicAtom* atom, double eta,
                      int V) {
    double base_total = 0.0;
    for (TokenId w : tokens) {
        if (w < 0 || w >= V) {
            throw std::invalid_argument("doc_predictive: token out of vocabulary range");
        }
    }
    if (atom != nullptr) base_total = atom->total_count;

    // The bag is order-free; canonicalize stray unsorted input.
    std::vector<TokenId> scratch;
    std::span<const TokenId> sorted_tokens = tokens;
    if (!std::is_sorted(tokens.begin(), tokens.end())) {
        scratch.assign(tokens.begin(), tokens.end());
        std::sort(scratch.begin(), scratch.end());
        sorted_tokens = scratch;
    }

    double log_p = 0.0;
    std::size_t j = 0;
    std::size_t i = 0;
    const double denom_base = eta * V + base_total;
    while (i < sorted_tokens.size()) {
        const TokenId w = sorted_tokens[i];
        std::size_t run = 1;
        while (i + run < sorted_tokens.size() && sorted_tokens[i + run] == w) ++run;
        const double base_w =
            eta + (atom != nullptr ? atom->word_counts[static_cast<std::size_t>(w)] : 0.0);
        for (std::size_t r = 0; r < run; ++r) {
            log_p += std::log((base_w + static_cast<double>(r)) /
                              (denom_base + static_cast<double>(j)));
            ++j;
        }
        i += run;
    }
    return log_p;
}

std::vector<double> ScoreTable::probabilities() const {
    std::vector<double> p(candidates.size(), 0.0);
    if (candidates.empty()) return p;
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double ls = candidates[i].log_score;
        p[i] = ls == kNegInf ? 0.0 : std::exp(ls - log_total);
        total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
}

std::size_t ScoreTable::sample(std::mt19937_64& rng) const {
    const std::vector<double> p = probabilities();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u <= acc) return i;
    }
    return p.size() - 1;
}

ScoreTable event_predictive(const ModelState& state, const Event& e) {
    const Hyperparams& hp = state.hyperparams();
    const double t = e.time;
    ScoreTable table;

    // Collapsed token-bag log likelihood per topic, reused across candidates.
    const auto& topics = state.topics();
    std::vector<double> doc_ll(topics.size() + 1, 0.0);
    const bool use_docs = state.options().mode == ModelMode::full;
    if (use_docs) {
        for (std::size_t k = 0; k < topics.size(); ++k) {
            doc_ll[k] = doc_predictive(e.tokens, &topics[k], hp.eta, hp.V);
        }
        doc_ll[topics.size()] = doc_predictive(e.tokens, nullptr, hp.eta, hp.V);
    }

    // Triggered candidates: the new event inherits the source topic.
    for (const ActiveSource& s : state.active_sources()) {
        const double rate = state.rates().alpha_at(s.user, e.user) *
                            state.trigger_kernel(s.topic, t - s.time);
        const double ls = (rate > 0.0 ? std::log(rate) : kNegInf) +
                          (use_docs ? doc_ll[static_cast<std::size_t>(s.topic)] : 0.0);
        table.candidates.push_back(Candidate{s.index, s.topic, false, ls});
    }

    // Exogenous candidates.
    const double log_mu = std::log(state.rates().mu[static_cast<std::size_t>(e.user)]);
    if (state.options().mode == ModelMode::single_topic) {
        const bool fresh = topics.empty();
        table.candidates.push_back(
            Candidate{kSelfTrigger, fresh ? kFreshTopic : 0, fresh, log_mu});
    } else {
        const auto& user = state.users()[static_cast<std::size_t>(e.user)];
        const auto crp = crp_topic_predictive(user, t, hp.nu, hp.gamma);
        for (const CrpEntry& c : crp) {
            if (c.local >= 0) {
                const TopicId k = user.local_topics[static_cast<std::size_t>(c.local)].topic;
                const double ls = c.prob > 0.0
                                      ? log_mu + std::log(c.prob) + doc_ll[static_cast<std::size_t>(k)]
                                      : kNegInf;
                table.candidates.push_back(Candidate{kSelfTrigger, k, false, ls});
            } else {
                const double log_new = c.prob > 0.0 ? log_mu + std::log(c.prob) : kNegInf;
                const auto franchise = franchise_predictive(topics, t, hp.nu, hp.zeta);
                for (const FranchiseEntry& f : franchise) {
                    const std::size_t slot =
                        f.topic == kFreshTopic ? topics.size() : static_cast<std::size_t>(f.topic);
                    const double ls = f.prob > 0.0 ? log_new + std::log(f.prob) + doc_ll[slot]
                                                   : kNegInf;
                    table.candidates.push_back(Candidate{kSelfTrigger, f.topic, true, ls});
                }
            }
        }
    }

    double max_ls = kNegInf;
    for (const Candidate& c : table.candidates) max_ls = std::max(max_ls, c.log_score);
    if (max_ls == kNegInf) {
        throw std::runtime_error("event_predictive: no candidate has positive score");
    }
    double sum = 0.0;
    for (const Candidate& c : table.candidates) {
        if (c.log_score != kNegInf) sum += std::exp(c.log_score - max_ls);
    }
    table.log_total = max_ls + std::log(sum);
    table.log_marginal = table.log_total - state.window_compensator();
    return table;
}

BranchingRecord to_record(const Candidate& c, const ModelState& state) {
    BranchingRecord r;
    r.trigger = c.trigger;
    r.new_local = c.new_local;
    r.topic = c.topic == kFreshTopic ? static_cast<TopicId>(state.topics().size()) : c.topic;
    return r;
}

}  // namespace hnp3
