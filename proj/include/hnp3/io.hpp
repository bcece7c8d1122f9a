#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hnp3/inference.hpp"
#include "hnp3/metrics.hpp"
#include "hnp3/simulator.hpp"
#include "hnp3/types.hpp"

namespace hnp3 {

/// Parse a JSON-lines event log: one {"t": float, "u": int, "w": [int, ...]}
/// object per line. Ties and sub-jitter inversions are resolved by nudging
/// the time forward by jitter_eps in input order; larger inversions are
/// errors. Malformed lines report their line number.
std::vector<Event> load_events(const std::string& path, double jitter_eps = 1e-9);

/// Write events in the same JSONL schema, one canonical line per event.
void save_events_jsonl(const std::string& path, std::span<const Event> events);

/// Optional sidecar vocabulary: a JSON array of strings, index = token id.
std::vector<std::string> load_vocab(const std::string& path);

// ---------------------------------------------------------------------------
// Snapshots: a single self-describing JSON document. kind == "truth" stores
// generator parameters; kind == "model" stores fitted estimates plus the
// full filter (records per particle) for warm starts.
// ---------------------------------------------------------------------------

nlohmann::json make_truth_snapshot(const GroundTruth& truth, std::int64_t n_events,
                                   double t_end, int V);
nlohmann::json make_model_snapshot(const ParticleFilter& filter);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

GroundTruth truth_from_snapshot(const nlohmann::json& snapshot);
ParticleFilter filter_from_snapshot(const nlohmann::json& snapshot,
                                    std::span<const Event> events);

/// Estimates stored in a snapshot's params block (either kind).
struct SnapshotParams {
    std::vector<double> mu;
    std::vector<double> alpha;  // U*U row-major
    std::vector<double> beta;   // per topic
    int U = 0;
};
SnapshotParams params_from_snapshot(const nlohmann::json& snapshot);

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

struct MetricsReport {
    struct Checkpoint {
        std::int64_t event = 0;
        double elapsed_s = 0.0;
        double rel_err_alpha = std::numeric_limits<double>::quiet_NaN();
        double rel_err_mu = std::numeric_limits<double>::quiet_NaN();
        double ess = 0.0;
        double log_marginal = 0.0;
    };
    std::vector<Checkpoint> checkpoints;
    std::vector<PredictionRow> held_out;
    std::vector<PredictionRow> baseline_held_out;
};

void write_metrics_csv(const std::string& path, const MetricsReport& report);
void write_predictions_csv(const std::string& path, std::span<const PredictionRow> rows);

/// Export the CSV report bundle: topic_intensity.csv, top_words.csv,
/// cascades.csv, betas.csv, and metrics.csv under out_dir. With no events
/// the files still exist with headers only.
void export_reports(const std::string& out_dir, const MapSummary& summary,
                    std::span<const Event> events, const std::vector<std::string>& vocab,
                    int grid_points = 200);

}  // namespace hnp3
