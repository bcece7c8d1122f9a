#include "hnp3/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hnp3/serialize.hpp"

namespace hnp3 {

namespace {

std::string fmt(double x) { return nlohmann::json(x).dump(); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return out;
}

}  // namespace

std::vector<Event> load_events(const std::string& path, double jitter_eps) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open events file: " + path);
    }
    std::vector<Event> events;
    std::string line;
    std::size_t line_no = 0;
    double prev_t = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            double t = j.at("t").get<double>();
            const auto u = j.at("u").get<UserId>();
            std::vector<TokenId> w;
            if (j.contains("w")) w = j.at("w").get<std::vector<TokenId>>();
            if (t < prev_t - jitter_eps) {
                throw std::runtime_error("timestamp decreases beyond jitter tolerance");
            }
            if (t <= prev_t) t = prev_t + jitter_eps;
            prev_t = t;
            events.emplace_back(t, u, std::move(w));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return events;
}

void save_events_jsonl(const std::string& path, std::span<const Event> events) {
    auto out = open_out(path);
    for (const Event& e : events) {
        nlohmann::json j{{"t", e.time}, {"u", e.user}, {"w", e.tokens}};
        out << j.dump() << '\n';
    }
}

std::vector<std::string> load_vocab(const std::string& path) {
    return read_json(path).get<std::vector<std::string>>();
}

void write_json(const std::string& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(1) << '\n';
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open json file: " + path);
    }
    nlohmann::json j;
    in >> j;
    return j;
}

namespace {

nlohmann::json alpha_rows(std::span<const double> alpha, int U) {
    nlohmann::json rows = nlohmann::json::array();
    for (int v = 0; v < U; ++v) {
        nlohmann::json row = nlohmann::json::array();
        for (int u = 0; u < U; ++u) {
            row.push_back(alpha[static_cast<std::size_t>(v) * U + u]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json make_truth_snapshot(const GroundTruth& truth, std::int64_t n_events,
                                   double t_end, int V) {
    nlohmann::json j;
    j["format"] = "hnp3-snapshot";
    j["version"] = 1;
    j["kind"] = "truth";
    j["U"] = truth.n_users();
    j["V"] = V;
    j["n_events"] = n_events;
    j["t_end"] = t_end;
    j["params"] = {{"mu", truth.mu},
                   {"alpha", alpha_rows(truth.alpha, truth.n_users())},
                   {"beta", truth.beta},
                   {"phi", truth.phi}};
    j["records"] = truth.records;
    j["branching_bound"] = truth.branching_bound;
    return j;
}

nlohmann::json make_model_snapshot(const ParticleFilter& filter) {
    nlohmann::json j;
    j["format"] = "hnp3-snapshot";
    j["version"] = 1;
    j["kind"] = "model";
    j["U"] = filter.hyperparams().U;
    j["V"] = filter.hyperparams().V;
    j["n_events"] = filter.n_observed();
    j["t_end"] = filter.t_last();
    if (filter.n_observed() > 0) {
        const MapSummary summary = filter.map_summary();
        std::vector<double> betas;
        betas.reserve(summary.topics.size());
        for (const TopicSummary& t : summary.topics) betas.push_back(t.beta);
        j["params"] = {{"mu", summary.rates.mu},
                       {"alpha", alpha_rows(summary.rates.alpha, summary.rates.U)},
                       {"beta", betas}};
        j["records"] = summary.records;
    } else {
        j["params"] = {{"mu", nlohmann::json::array()},
                       {"alpha", nlohmann::json::array()},
                       {"beta", nlohmann::json::array()}};
        j["records"] = nlohmann::json::array();
    }
    j["filter"] = filter.to_json();
    return j;
}

GroundTruth truth_from_snapshot(const nlohmann::json& snapshot) {
    if (snapshot.value("format", std::string()) != "hnp3-snapshot") {
        throw std::invalid_argument("not a snapshot document");
    }
    GroundTruth truth;
    const auto& params = snapshot.at("params");
    truth.mu = params.at("mu").get<std::vector<double>>();
    const int U = static_cast<int>(truth.mu.size());
    truth.alpha.assign(static_cast<std::size_t>(U) * U, 0.0);
    const auto& rows = params.at("alpha");
    for (int v = 0; v < U; ++v) {
        for (int u = 0; u < U; ++u) {
            truth.alpha[static_cast<std::size_t>(v) * U + u] =
                rows.at(static_cast<std::size_t>(v)).at(static_cast<std::size_t>(u)).get<double>();
        }
    }
    truth.beta = params.at("beta").get<std::vector<double>>();
    if (params.contains("phi")) {
        truth.phi = params.at("phi").get<std::vector<std::vector<double>>>();
    }
    if (snapshot.contains("records")) {
        truth.records = snapshot.at("records").get<std::vector<BranchingRecord>>();
    }
    truth.branching_bound = snapshot.value("branching_bound", 0.0);
    return truth;
}

ParticleFilter filter_from_snapshot(const nlohmann::json& snapshot,
                                    std::span<const Event> events) {
    if (!snapshot.contains("filter")) {
        throw std::invalid_argument("snapshot has no filter block (is it a truth file?)");
    }
    return ParticleFilter::from_json(snapshot.at("filter"), events);
}

SnapshotParams params_from_snapshot(const nlohmann::json& snapshot) {
    SnapshotParams p;
    const auto& params = snapshot.at("params");
    p.mu = params.at("mu").get<std::vector<double>>();
    p.U = static_cast<int>(p.mu.size());
    p.alpha.assign(static_cast<std::size_t>(p.U) * p.U, 0.0);
    const auto& rows = params.at("alpha");
    for (int v = 0; v < p.U; ++v) {
        for (int u = 0; u < p.U; ++u) {
            p.alpha[static_cast<std::size_t>(v) * p.U + u] =
                rows.at(static_cast<std::size_t>(v)).at(static_cast<std::size_t>(u)).get<double>();
        }
    }
    p.beta = params.at("beta").get<std::vector<double>>();
    return p;
}

void write_metrics_csv(const std::string& path, const MetricsReport& report) {
    for (std::size_t i = 1; i < report.checkpoints.size(); ++i) {
        if (report.checkpoints[i].event <= report.checkpoints[i - 1].event) {
            throw std::invalid_argument("metrics checkpoints must be strictly increasing");
        }
    }
    auto out = open_out(path);
    out << "event,elapsed_s,rel_err_alpha,rel_err_mu,ess,log_marginal\n";
    for (const auto& c : report.checkpoints) {
        out << c.event << ',' << fmt(c.elapsed_s) << ',' << fmt(c.rel_err_alpha) << ','
            << fmt(c.rel_err_mu) << ',' << fmt(c.ess) << ',' << fmt(c.log_marginal) << '\n';
    }
}

void write_predictions_csv(const std::string& path, std::span<const PredictionRow> rows) {
    auto out = open_out(path);
    out << "event,time,user,log_density\n";
    for (const PredictionRow& r : rows) {
        if (!std::isfinite(r.log_density)) {
            throw std::invalid_argument("prediction log density is not finite");
        }
        out << r.index << ',' << fmt(r.time) << ',' << r.user << ',' << fmt(r.log_density)
            << '\n';
    }
}

void export_reports(const std::string& out_dir, const MapSummary& summary,
                    std::span<const Event> events, const std::vector<std::string>& vocab,
                    int grid_points) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    // Per-topic triggered intensity on a uniform grid.
    {
        auto out = open_out(path("topic_intensity.csv"));
        out << "time";
        for (const TopicSummary& t : summary.topics) out << ",topic_" << t.id;
        out << '\n';
        if (!events.empty() && grid_points > 0) {
            std::vector<double> out_rate(summary.rates.mu.size(), 0.0);
            for (int v = 0; v < summary.rates.U; ++v) {
                out_rate[static_cast<std::size_t>(v)] = summary.rates.alpha_row_sum(v);
            }
            const double t_end = summary.t_last;
            for (int g = 0; g < grid_points; ++g) {
                const double t = t_end * (g + 1) / grid_points;
                out << fmt(t);
                for (const TopicSummary& topic : summary.topics) {
                    double intensity = 0.0;
                    for (std::size_t i = 0; i < events.size(); ++i) {
                        if (events[i].time > t) break;
                        if (summary.assignments[i] != topic.id) continue;
                        intensity += out_rate[static_cast<std::size_t>(events[i].user)] *
                                     std::exp(-topic.beta * (t - events[i].time));
                    }
                    out << ',' << fmt(intensity);
                }
                out << '\n';
            }
        }
    }

    {
        auto out = open_out(path("top_words.csv"));
        out << "topic,rank,token,count\n";
        for (const TopicSummary& topic : summary.topics) {
            int rank = 1;
            double prev = std::numeric_limits<double>::infinity();
            for (const auto& [token, count] : topic.top_words) {
                if (count > prev) {
                    throw std::logic_error("top words must be count-descending");
                }
                prev = count;
                out << topic.id << ',' << rank << ',';
                if (static_cast<std::size_t>(token) < vocab.size()) {
                    out << vocab[static_cast<std::size_t>(token)];
                } else {
                    out << token;
                }
                out << ',' << fmt(count) << '\n';
                ++rank;
            }
        }
    }

    {
        auto out = open_out(path("cascades.csv"));
        out << "event,trigger,topic,user,root\n";
        for (std::size_t i = 0; i < summary.records.size(); ++i) {
            out << i << ',' << summary.records[i].trigger << ',' << summary.records[i].topic
                << ',' << (i < events.size() ? events[i].user : -1) << ','
                << summary.cascade_root[i] << '\n';
        }
    }

    {
        auto out = open_out(path("betas.csv"));
        out << "topic,beta,event_count\n";
        for (const TopicSummary& topic : summary.topics) {
            out << topic.id << ',' << fmt(topic.beta) << ',' << topic.event_count << '\n';
        }
    }

    {
        auto out = open_out(path("metrics.csv"));
        out << "metric,value\n";
        out << "n_events," << summary.records.size() << '\n';
        out << "n_topics," << summary.n_topics << '\n';
        out << "t_last," << fmt(summary.t_last) << '\n';
        std::size_t cascades = 0;
        for (std::size_t i = 0; i < summary.records.size(); ++i) {
            if (summary.records[i].exogenous()) ++cascades;
        }
        out << "n_cascades," << cascades << '\n';
    }
}

}  // namespace hnp3
