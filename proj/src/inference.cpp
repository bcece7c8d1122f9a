#include "hnp3/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hnp3/serialize.hpp"

namespace hnp3 {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t tag) {
    std::uint64_t s = splitmix64(seed ^ 0xD1B54A32D192ED03ull);
    s = splitmix64(s ^ splitmix64(a));
    s = splitmix64(s ^ splitmix64(b));
    s = splitmix64(s ^ splitmix64(tag));
    return std::mt19937_64(s);
}

std::vector<int> systematic_offspring(std::span<const double> weights, int count, double offset) {
    if (weights.empty() || count <= 0) {
        throw std::invalid_argument("systematic_offspring: empty weights or count");
    }
    std::vector<int> offspring(weights.size(), 0);
    std::size_t i = 0;
    double cum = weights[0];
    for (int j = 0; j < count; ++j) {
        const double pos = (offset + j) / count;
        while (pos > cum && i + 1 < weights.size()) {
            ++i;
            cum += weights[i];
        }
        offspring[i] += 1;
    }
    return offspring;
}

std::vector<EventIndex> cascade_roots(std::span<const BranchingRecord> records) {
    std::vector<EventIndex> roots(records.size(), 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        roots[i] = records[i].exogenous()
                       ? static_cast<EventIndex>(i)
                       : roots[static_cast<std::size_t>(records[i].trigger)];
    }
    return roots;
}

ParticleFilter::ParticleFilter(const Hyperparams& hp, const InferOptions& opt)
    : hp_(hp), opt_(opt) {
    hp_.validate();
    if (opt_.P < 1) throw std::invalid_argument("particle count must be >= 1");
    if (!(opt_.ess_threshold > 0.0) || opt_.ess_threshold > 1.0) {
        throw std::invalid_argument("ess_threshold must lie in (0, 1]");
    }
    particles_.reserve(static_cast<std::size_t>(opt_.P));
    for (int p = 0; p < opt_.P; ++p) {
        particles_.push_back(Particle{ModelState(hp_, opt_.state), {},
                                      -std::log(static_cast<double>(opt_.P)), false});
    }
}

void ParticleFilter::validate_event(const Event& e) const {
    if (n_observed_ > 0 && !(e.time > t_last_)) {
        throw std::invalid_argument("observe: event times must be strictly increasing");
    }
    if (e.user < 0 || e.user >= hp_.U) {
        throw std::invalid_argument("observe: user id out of range");
    }
    for (TokenId w : e.tokens) {
        if (w < 0 || w >= hp_.V) {
            throw std::invalid_argument("observe: token id out of vocabulary range");
        }
    }
    if (e.tokens.empty() && opt_.state.mode == ModelMode::full && !opt_.state.times_only) {
        throw std::invalid_argument("observe: empty document outside times-only mode");
    }
}

void ParticleFilter::observe(const Event& e) {
    validate_event(e);
    const std::uint64_t n = static_cast<std::uint64_t>(n_observed_);
    const std::vector<double> prev_weights = normalized_weights();

    std::vector<double> increments(particles_.size(), kNegInf);
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        Particle& particle = particles_[p];
        if (particle.degenerate) continue;
        particle.state.begin_event(e.time);
        const ScoreTable table = event_predictive(particle.state, e);
        auto rng = stream_rng(opt_.seed, n, p, 0);
        const std::size_t pick = table.sample(rng);
        const BranchingRecord record = to_record(table.candidates[pick], particle.state);
        particle.records.push_back(record);
        particle.state.apply_record(e, record);
        if (std::isfinite(table.log_marginal)) {
            increments[p] = table.log_marginal;
        } else {
            particle.degenerate = true;
        }
    }

    // Marginal-likelihood update with the pre-event weights.
    double max_term = kNegInf;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        if (prev_weights[p] > 0.0 && increments[p] != kNegInf) {
            max_term = std::max(max_term, increments[p]);
        }
    }
    if (max_term == kNegInf) {
        throw std::runtime_error("all particles degenerate at event " +
                                 std::to_string(n_observed_) +
                                 "; check vocabulary and timestamps");
    }
    double z = 0.0;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        if (prev_weights[p] > 0.0 && increments[p] != kNegInf) {
            z += prev_weights[p] * std::exp(increments[p] - max_term);
        }
    }
    log_marginal_ += max_term + std::log(z);

    // Weight update and normalization.
    double max_lw = kNegInf;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        Particle& particle = particles_[p];
        particle.log_weight =
            particle.degenerate ? kNegInf : particle.log_weight + increments[p];
        max_lw = std::max(max_lw, particle.log_weight);
    }
    double wsum = 0.0;
    for (const Particle& particle : particles_) {
        if (particle.log_weight != kNegInf) wsum += std::exp(particle.log_weight - max_lw);
    }
    const double log_norm = max_lw + std::log(wsum);
    for (Particle& particle : particles_) {
        if (particle.log_weight != kNegInf) particle.log_weight -= log_norm;
    }

    n_observed_ += 1;
    t_last_ = e.time;

    if (particles_.size() > 1) {
        const double threshold = opt_.ess_threshold * static_cast<double>(particles_.size());
        if (ess() < threshold) {
            auto rng = stream_rng(opt_.seed, n, 0, 1);
            resample(rng);
        }
    }
}

void ParticleFilter::resample(std::mt19937_64& rng) {
    const std::vector<double> weights = normalized_weights();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int count = static_cast<int>(particles_.size());
    const std::vector<int> offspring = systematic_offspring(weights, count, unif(rng));

    std::vector<Particle> next;
    next.reserve(particles_.size());
    const double log_uniform = -std::log(static_cast<double>(count));
    for (std::size_t i = 0; i < particles_.size(); ++i) {
        for (int c = 0; c < offspring[i]; ++c) {
            next.push_back(particles_[i]);
            next.back().log_weight = log_uniform;
            next.back().degenerate = false;
        }
    }
    particles_ = std::move(next);
}

double effective_sample_size(std::span<const double> normalized_weights) {
    double sum_sq = 0.0;
    for (const double w : normalized_weights) sum_sq += w * w;
    return 1.0 / sum_sq;
}

double ParticleFilter::ess() const {
    const std::vector<double> w = normalized_weights();
    return effective_sample_size(w);
}

std::vector<double> ParticleFilter::normalized_weights() const {
    std::vector<double> w(particles_.size(), 0.0);
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        w[p] = particles_[p].log_weight == kNegInf ? 0.0 : std::exp(particles_[p].log_weight);
    }
    return w;
}

std::size_t ParticleFilter::map_index() const {
    std::size_t best = 0;
    for (std::size_t p = 1; p < particles_.size(); ++p) {
        if (particles_[p].log_weight > particles_[best].log_weight) best = p;
    }
    return best;
}

MapSummary ParticleFilter::map_summary(std::size_t top_words) const {
    if (n_observed_ == 0) {
        throw std::logic_error("map_summary requires at least one observed event");
    }
    const Particle& map = map_particle();
    MapSummary s;
    s.records = map.records;
    s.assignments.reserve(map.records.size());
    for (const BranchingRecord& r : map.records) s.assignments.push_back(r.topic);
    s.cascade_root = cascade_roots(map.records);
    s.n_topics = static_cast<int>(map.state.topics().size());
    s.user_topic_counts.reserve(map.state.users().size());
    for (const UserState& u : map.state.users()) {
        s.user_topic_counts.push_back(static_cast<int>(u.local_topics.size()));
    }
    for (const TopicAtom& atom : map.state.topics()) {
        TopicSummary ts;
        ts.id = atom.id;
        ts.beta = map.state.beta_estimate(atom.id);
        ts.event_count = atom.event_count;
        std::vector<std::pair<TokenId, double>> counts;
        for (std::size_t w = 0; w < atom.word_counts.size(); ++w) {
            if (atom.word_counts[w] > 0.0) {
                counts.emplace_back(static_cast<TokenId>(w), atom.word_counts[w]);
            }
        }
        std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (counts.size() > top_words) counts.resize(top_words);
        ts.top_words = std::move(counts);
        s.topics.push_back(std::move(ts));
    }
    s.rates = map.state.rate_estimates(t_last_);
    s.t_last = t_last_;
    return s;
}

nlohmann::json ParticleFilter::to_json() const {
    nlohmann::json j;
    j["format"] = "hnp3-filter";
    j["version"] = 1;
    j["hyperparams"] = hp_;
    j["options"] = opt_;
    j["n_observed"] = n_observed_;
    j["t_last"] = t_last_;
    j["log_marginal"] = log_marginal_;
    j["map"] = map_index();
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json records = nlohmann::json::array();
    for (const Particle& p : particles_) {
        if (p.log_weight == kNegInf) {
            weights.push_back(nullptr);
        } else {
            weights.push_back(p.log_weight);
        }
        records.push_back(p.records);
    }
    j["log_weights"] = std::move(weights);
    j["records"] = std::move(records);
    return j;
}

ParticleFilter ParticleFilter::from_json(const nlohmann::json& j, std::span<const Event> events) {
    if (j.value("format", std::string()) != "hnp3-filter") {
        throw std::invalid_argument("not a filter snapshot");
    }
    const auto hp = j.at("hyperparams").get<Hyperparams>();
    const auto opt = j.at("options").get<InferOptions>();
    ParticleFilter filter(hp, opt);

    const auto n = j.at("n_observed").get<std::int64_t>();
    if (static_cast<std::size_t>(n) > events.size()) {
        throw std::invalid_argument("snapshot consumed more events than provided");
    }
    const auto& weights = j.at("log_weights");
    const auto& records = j.at("records");
    if (static_cast<int>(weights.size()) != opt.P || static_cast<int>(records.size()) != opt.P) {
        throw std::invalid_argument("snapshot particle count mismatch");
    }
    for (int p = 0; p < opt.P; ++p) {
        Particle& particle = filter.particles_[static_cast<std::size_t>(p)];
        particle.records = records[static_cast<std::size_t>(p)]
                               .get<std::vector<BranchingRecord>>();
        if (static_cast<std::int64_t>(particle.records.size()) != n) {
            throw std::invalid_argument("snapshot record count mismatch");
        }
        for (std::int64_t i = 0; i < n; ++i) {
            const Event& e = events[static_cast<std::size_t>(i)];
            particle.state.begin_event(e.time);
            particle.state.apply_record(e, particle.records[static_cast<std::size_t>(i)]);
        }
        if (weights[static_cast<std::size_t>(p)].is_null()) {
            particle.log_weight = kNegInf;
            particle.degenerate = true;
        } else {
            particle.log_weight = weights[static_cast<std::size_t>(p)].get<double>();
        }
    }
    filter.n_observed_ = n;
    filter.t_last_ = n > 0 ? events[static_cast<std::size_t>(n - 1)].time : 0.0;
    filter.log_marginal_ = j.at("log_marginal").get<double>();
    return filter;
}

}  // namespace hnp3
