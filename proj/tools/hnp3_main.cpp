// Command line front end: simulate | fit | eval | predict | report.
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hnp3/config.hpp"
#include "hnp3/inference.hpp"
#include "hnp3/io.hpp"
#include "hnp3/log.hpp"
#include "hnp3/metrics.hpp"
#include "hnp3/serialize.hpp"
#include "hnp3/simulator.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "hnp3_out";
    std::optional<std::uint64_t> seed;
    std::optional<int> particles;
    std::optional<double> train_frac;
    std::string baseline;
    std::int64_t horizon = -1;
};

std::string out_file(const CommonArgs& args, const char* name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

hnp3::ExperimentConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) {
        throw std::invalid_argument("this subcommand requires --config");
    }
    return hnp3::ExperimentConfig::from_file(args.config_path);
}

hnp3::InferOptions infer_options(const hnp3::ExperimentConfig& config, const CommonArgs& args) {
    hnp3::InferOptions opt = config.inference.options;
    if (args.seed) opt.seed = *args.seed;
    if (args.particles) opt.P = *args.particles;
    if (args.baseline == "hawkes") opt.state.mode = hnp3::ModelMode::single_topic;
    return opt;
}

int run_simulate(const CommonArgs& args) {
    hnp3::ExperimentConfig config = load_config(args);
    if (args.seed) config.simulation.seed = *args.seed;
    const hnp3::SimulationInputs inputs = hnp3::build_simulation_inputs(config);
    const hnp3::SimResult result =
        hnp3::simulate(config.hyperparams, inputs.mu, inputs.alpha, inputs.topics,
                       inputs.options, config.simulation.seed);
    hnp3::save_events_jsonl(out_file(args, "events.jsonl"), result.events);
    hnp3::write_json(out_file(args, "truth.json"),
                     hnp3::make_truth_snapshot(result.truth,
                                               static_cast<std::int64_t>(result.events.size()),
                                               result.t_end, config.hyperparams.V));
    std::cout << "simulated " << result.events.size() << " events over [0, " << result.t_end
              << "] into " << args.out_dir << "\n";
    return 0;
}

int run_fit(const CommonArgs& args, const std::string& events_path,
            const std::string& truth_path) {
    const hnp3::ExperimentConfig config = load_config(args);
    const std::vector<hnp3::Event> events = hnp3::load_events(events_path);
    std::optional<hnp3::GroundTruth> truth;
    if (!truth_path.empty()) {
        truth = hnp3::truth_from_snapshot(hnp3::read_json(truth_path));
    }

    const double frac = args.train_frac.value_or(1.0);
    if (!(frac > 0.0 && frac <= 1.0)) {
        throw std::invalid_argument("--train-frac must lie in (0, 1]");
    }
    const auto n_train = static_cast<std::size_t>(
        std::floor(frac * static_cast<double>(events.size())));

    hnp3::ParticleFilter filter(config.hyperparams, infer_options(config, args));
    std::vector<std::int64_t> checkpoints = config.eval.checkpoints;
    if (checkpoints.empty()) {
        checkpoints = hnp3::default_checkpoints(static_cast<std::int64_t>(n_train));
    }

    hnp3::MetricsReport report;
    const auto start = Clock::now();
    std::size_t next_cp = 0;
    for (std::size_t i = 0; i < n_train; ++i) {
        filter.observe(events[i]);
        if (next_cp < checkpoints.size() &&
            static_cast<std::int64_t>(i + 1) == checkpoints[next_cp]) {
            hnp3::MetricsReport::Checkpoint cp;
            cp.event = checkpoints[next_cp];
            cp.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
            cp.ess = filter.ess();
            cp.log_marginal = filter.log_marginal();
            if (truth) {
                const hnp3::RateEstimates est =
                    filter.map_particle().state.rate_estimates(filter.t_last());
                cp.rel_err_alpha = hnp3::relative_error(est.alpha, truth->alpha);
                cp.rel_err_mu = hnp3::relative_error(est.mu, truth->mu);
            }
            report.checkpoints.push_back(cp);
            ++next_cp;
        }
    }
    hnp3::write_json(out_file(args, "model.json"), hnp3::make_model_snapshot(filter));
    hnp3::write_metrics_csv(out_file(args, "metrics.csv"), report);
    std::cout << "fitted " << n_train << " of " << events.size() << " events; log marginal "
              << filter.log_marginal() << "; model written to " << args.out_dir << "\n";
    if (truth && !report.checkpoints.empty()) {
        const auto& last = report.checkpoints.back();
        std::cout << "final relative errors: alpha " << last.rel_err_alpha << ", mu "
                  << last.rel_err_mu << "\n";
    }
    return 0;
}

int run_eval(const CommonArgs& args, const std::string& snapshot_path,
             const std::string& events_path, const std::string& truth_path) {
    const nlohmann::json snapshot = hnp3::read_json(snapshot_path);
    hnp3::MetricsReport report;
    int bootstrap_resamples = 1000;
    if (!args.config_path.empty()) {
        bootstrap_resamples = load_config(args).eval.bootstrap_resamples;
    }

    if (!truth_path.empty()) {
        const hnp3::GroundTruth truth = hnp3::truth_from_snapshot(hnp3::read_json(truth_path));
        const hnp3::SnapshotParams params = hnp3::params_from_snapshot(snapshot);
        const double err_alpha = hnp3::relative_error(params.alpha, truth.alpha);
        const double err_mu = hnp3::relative_error(params.mu, truth.mu);
        std::cout << "relative error (Frobenius) alpha: " << err_alpha << "\n";
        std::cout << "relative error (Frobenius) mu:    " << err_mu << "\n";
        hnp3::MetricsReport::Checkpoint cp;
        cp.event = snapshot.at("n_events").get<std::int64_t>();
        cp.rel_err_alpha = err_alpha;
        cp.rel_err_mu = err_mu;
        if (snapshot.contains("records") && !truth.records.empty()) {
            const auto records =
                snapshot.at("records").get<std::vector<hnp3::BranchingRecord>>();
            const std::size_t n = std::min(records.size(), truth.records.size());
            std::vector<int> a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = records[i].topic;
                b[i] = truth.records[i].topic;
            }
            std::cout << "topic adjusted Rand vs truth:  " << hnp3::adjusted_rand_index(a, b)
                      << "\n";
        }
        report.checkpoints.push_back(cp);
    }

    if (!events_path.empty()) {
        const std::vector<hnp3::Event> events = hnp3::load_events(events_path);
        hnp3::ParticleFilter filter = hnp3::filter_from_snapshot(snapshot, events);
        const auto consumed = static_cast<std::size_t>(filter.n_observed());
        if (consumed >= events.size()) {
            throw std::invalid_argument("no held-out events after the snapshot's train split");
        }
        std::span<const hnp3::Event> held(events.data() + consumed,
                                          events.size() - consumed);
        report.held_out = hnp3::next_event_time_loglik(filter, held);
        double mean = 0.0;
        for (const auto& row : report.held_out) mean += row.log_density;
        mean /= static_cast<double>(report.held_out.size());
        std::cout << "held-out events scored: " << report.held_out.size()
                  << ", mean time log-density: " << mean << "\n";
        hnp3::write_predictions_csv(out_file(args, "heldout.csv"), report.held_out);

        if (args.baseline == "hawkes") {
            // Same training prefix, single forced topic, documents ignored.
            hnp3::Hyperparams hp = snapshot.at("filter").at("hyperparams")
                                       .get<hnp3::Hyperparams>();
            hnp3::InferOptions opt =
                snapshot.at("filter").at("options").get<hnp3::InferOptions>();
            opt.state.mode = hnp3::ModelMode::single_topic;
            if (args.seed) opt.seed = *args.seed;
            hnp3::ParticleFilter baseline(hp, opt);
            for (std::size_t i = 0; i < consumed; ++i) baseline.observe(events[i]);
            report.baseline_held_out = hnp3::next_event_time_loglik(baseline, held);
            std::vector<double> diffs(report.held_out.size());
            double mean_diff = 0.0;
            for (std::size_t i = 0; i < diffs.size(); ++i) {
                diffs[i] = report.held_out[i].log_density -
                           report.baseline_held_out[i].log_density;
                mean_diff += diffs[i];
            }
            mean_diff /= static_cast<double>(diffs.size());
            const auto [lo, hi] = hnp3::bootstrap_mean_ci(diffs, bootstrap_resamples, 0.95,
                                                          args.seed.value_or(0));
            std::cout << "paired mean log-density gain over hawkes baseline: " << mean_diff
                      << "  (95% bootstrap CI [" << lo << ", " << hi << "])\n";
            hnp3::write_predictions_csv(out_file(args, "heldout_baseline.csv"),
                                        report.baseline_held_out);
        }
    }

    if (!report.checkpoints.empty()) {
        hnp3::write_metrics_csv(out_file(args, "metrics.csv"), report);
    }
    return 0;
}

int run_predict(const CommonArgs& args, const std::string& snapshot_path,
                const std::string& events_path, const std::string& save_model) {
    const nlohmann::json snapshot = hnp3::read_json(snapshot_path);
    const std::vector<hnp3::Event> events = hnp3::load_events(events_path);
    hnp3::ParticleFilter filter = hnp3::filter_from_snapshot(snapshot, events);
    const auto consumed = static_cast<std::size_t>(filter.n_observed());
    const std::int64_t horizon = args.horizon > 0 ? args.horizon : 100;
    if (consumed + static_cast<std::size_t>(horizon) > events.size()) {
        throw std::invalid_argument("not enough events after the snapshot for --horizon " +
                                    std::to_string(horizon));
    }
    std::span<const hnp3::Event> held(events.data() + consumed, events.size() - consumed);
    const auto rows = hnp3::next_event_time_loglik(filter, held, horizon);
    hnp3::write_predictions_csv(out_file(args, "predictions.csv"), rows);
    double mean = 0.0;
    for (const auto& row : rows) mean += row.log_density;
    std::cout << "predicted " << rows.size() << " events, mean time log-density "
              << mean / static_cast<double>(rows.size()) << "\n";
    if (!save_model.empty()) {
        hnp3::write_json(save_model, hnp3::make_model_snapshot(filter));
    }
    return 0;
}

int run_report(const CommonArgs& args, const std::string& snapshot_path,
               const std::string& events_path, const std::string& vocab_path) {
    const nlohmann::json snapshot = hnp3::read_json(snapshot_path);
    std::vector<hnp3::Event> events;
    if (!events_path.empty()) events = hnp3::load_events(events_path);
    std::vector<std::string> vocab;
    if (!vocab_path.empty()) vocab = hnp3::load_vocab(vocab_path);

    hnp3::MapSummary summary;
    int grid_points = 200;
    std::size_t top_words = 20;
    if (!args.config_path.empty()) {
        const auto config = load_config(args);
        grid_points = config.eval.grid_points;
        top_words = static_cast<std::size_t>(config.eval.top_words);
    }
    if (snapshot.contains("filter") && snapshot.at("n_events").get<std::int64_t>() > 0) {
        const hnp3::ParticleFilter filter = hnp3::filter_from_snapshot(snapshot, events);
        summary = filter.map_summary(top_words);
    }
    hnp3::export_reports(args.out_dir, summary, events, vocab, grid_points);
    std::cout << "reports written to " << args.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HNP3: topic-marked multivariate Hawkes process engine"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string events_path;
    std::string truth_path;
    std::string snapshot_path;
    std::string vocab_path;
    std::string save_model;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "experiment config (JSON)");
        cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
        cmd->add_option("--seed", args.seed, "override the config seed");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic event stream");
    add_common(simulate);

    CLI::App* fit = app.add_subcommand("fit", "run the online filter over an event log");
    add_common(fit);
    fit->add_option("--events", events_path, "JSONL event log")->required();
    fit->add_option("--truth", truth_path, "truth snapshot for checkpoint errors");
    fit->add_option("--particles", args.particles, "particle count override");
    fit->add_option("--train-frac", args.train_frac, "fit only the first fraction of events");
    fit->add_option("--baseline", args.baseline,
                    "'hawkes': single forced topic, documents ignored");

    CLI::App* eval = app.add_subcommand("eval", "compare a fitted model to truth or held-out data");
    add_common(eval);
    eval->add_option("--snapshot", snapshot_path, "fitted model snapshot")->required();
    eval->add_option("--events", events_path, "event log with held-out tail");
    eval->add_option("--truth", truth_path, "truth snapshot");
    eval->add_option("--baseline", args.baseline, "'hawkes': also score the baseline");

    CLI::App* predict = app.add_subcommand("predict", "rolling next-event time log-densities");
    add_common(predict);
    predict->add_option("--snapshot", snapshot_path, "fitted model snapshot")->required();
    predict->add_option("--events", events_path, "JSONL event log")->required();
    predict->add_option("--horizon", args.horizon, "number of events to score (default 100)");
    predict->add_option("--save-model", save_model, "write the advanced snapshot here");

    CLI::App* report = app.add_subcommand("report", "export CSV report bundle");
    add_common(report);
    report->add_option("--snapshot", snapshot_path, "model snapshot")->required();
    report->add_option("--events", events_path, "JSONL event log");
    report->add_option("--vocab", vocab_path, "JSON array mapping token id to string");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(args);
        if (fit->parsed()) return run_fit(args, events_path, truth_path);
        if (eval->parsed()) return run_eval(args, snapshot_path, events_path, truth_path);
        if (predict->parsed()) return run_predict(args, snapshot_path, events_path, save_model);
        if (report->parsed()) return run_report(args, snapshot_path, events_path, vocab_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
