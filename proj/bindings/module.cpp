#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hnp3/config.hpp"
#include "hnp3/inference.hpp"
#include "hnp3/io.hpp"
#include "hnp3/metrics.hpp"
#include "hnp3/serialize.hpp"
#include "hnp3/simulator.hpp"

namespace py = pybind11;
using namespace hnp3;

namespace {

py::dict truth_to_dict(const GroundTruth& truth) {
    py::dict d;
    d["mu"] = truth.mu;
    const int U = truth.n_users();
    std::vector<std::vector<double>> alpha(static_cast<std::size_t>(U));
    for (int v = 0; v < U; ++v) {
        alpha[static_cast<std::size_t>(v)].assign(
            truth.alpha.begin() + static_cast<long>(v) * U,
            truth.alpha.begin() + static_cast<long>(v + 1) * U);
    }
    d["alpha"] = alpha;
    d["beta"] = truth.beta;
    d["phi"] = truth.phi;
    std::vector<std::tuple<std::int64_t, int, bool>> records;
    records.reserve(truth.records.size());
    for (const auto& r : truth.records) {
        records.emplace_back(r.trigger, r.topic, r.new_local);
    }
    d["records"] = records;
    d["branching_bound"] = truth.branching_bound;
    return d;
}

py::dict summary_to_dict(const MapSummary& s) {
    py::dict d;
    std::vector<std::tuple<std::int64_t, int, bool>> records;
    records.reserve(s.records.size());
    for (const auto& r : s.records) records.emplace_back(r.trigger, r.topic, r.new_local);
    d["records"] = records;
    d["assignments"] = s.assignments;
    d["cascade_root"] = s.cascade_root;
    d["n_topics"] = s.n_topics;
    d["user_topic_counts"] = s.user_topic_counts;
    py::list topics;
    for (const TopicSummary& t : s.topics) {
        py::dict td;
        td["id"] = t.id;
        td["beta"] = t.beta;
        td["event_count"] = t.event_count;
        td["top_words"] = t.top_words;
        topics.append(td);
    }
    d["topics"] = topics;
    d["mu"] = s.rates.mu;
    std::vector<std::vector<double>> alpha(static_cast<std::size_t>(s.rates.U));
    for (int v = 0; v < s.rates.U; ++v) {
        alpha[static_cast<std::size_t>(v)].assign(
            s.rates.alpha.begin() + static_cast<long>(v) * s.rates.U,
            s.rates.alpha.begin() + static_cast<long>(v + 1) * s.rates.U);
    }
    d["alpha"] = alpha;
    d["t_last"] = s.t_last;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Online inference and simulation for a topic-marked multivariate "
              "Hawkes process with shared nonparametric topics";

    py::class_<GammaPrior>(m, "GammaPrior")
        .def(py::init<double, double>(), py::arg("shape") = 1.0, py::arg("rate") = 1.0)
        .def_readwrite("shape", &GammaPrior::shape)
        .def_readwrite("rate", &GammaPrior::rate)
        .def("mean", &GammaPrior::mean);

    py::class_<Hyperparams>(m, "Hyperparams")
        .def(py::init<>())
        .def_readwrite("gamma", &Hyperparams::gamma)
        .def_readwrite("zeta", &Hyperparams::zeta)
        .def_readwrite("nu", &Hyperparams::nu)
        .def_readwrite("eta", &Hyperparams::eta)
        .def_readwrite("beta_prior", &Hyperparams::beta_prior)
        .def_readwrite("mu_prior", &Hyperparams::mu_prior)
        .def_readwrite("alpha_prior", &Hyperparams::alpha_prior)
        .def_readwrite("M", &Hyperparams::M)
        .def_readwrite("P", &Hyperparams::P)
        .def_readwrite("U", &Hyperparams::U)
        .def_readwrite("V", &Hyperparams::V)
        .def("validate", &Hyperparams::validate);

    py::class_<Event>(m, "Event")
        .def(py::init<double, UserId, std::vector<TokenId>>(), py::arg("time"),
             py::arg("user"), py::arg("tokens") = std::vector<TokenId>{})
        .def_readonly("time", &Event::time)
        .def_readonly("user", &Event::user)
        .def_readonly("tokens", &Event::tokens)
        .def("__repr__", [](const Event& e) {
            return "Event(t=" + std::to_string(e.time) + ", u=" + std::to_string(e.user) +
                   ", |doc|=" + std::to_string(e.tokens.size()) + ")";
        });

    py::enum_<ModelMode>(m, "ModelMode")
        .value("full", ModelMode::full)
        .value("single_topic", ModelMode::single_topic);

    py::class_<InferOptions>(m, "InferOptions")
        .def(py::init<>())
        .def_readwrite("P", &InferOptions::P)
        .def_readwrite("ess_threshold", &InferOptions::ess_threshold)
        .def_readwrite("seed", &InferOptions::seed)
        .def_property(
            "mode", [](const InferOptions& o) { return o.state.mode; },
            [](InferOptions& o, ModelMode mode) { o.state.mode = mode; })
        .def_property(
            "refresh_every", [](const InferOptions& o) { return o.state.refresh_every; },
            [](InferOptions& o, int r) { o.state.refresh_every = r; })
        .def_property(
            "truncation_w", [](const InferOptions& o) { return o.state.truncation_w; },
            [](InferOptions& o, double w) { o.state.truncation_w = w; })
        .def_property(
            "times_only", [](const InferOptions& o) { return o.state.times_only; },
            [](InferOptions& o, bool v) { o.state.times_only = v; });

    py::class_<ParticleFilter>(m, "ParticleFilter")
        .def(py::init<const Hyperparams&, const InferOptions&>(), py::arg("hyperparams"),
             py::arg("options") = InferOptions{})
        .def("observe",
             [](ParticleFilter& f, double t, UserId u, std::vector<TokenId> w) {
                 f.observe(Event(t, u, std::move(w)));
             },
             py::arg("time"), py::arg("user"), py::arg("tokens") = std::vector<TokenId>{})
        .def("observe_event", [](ParticleFilter& f, const Event& e) { f.observe(e); })
        .def("observe_events",
             [](ParticleFilter& f, const std::vector<Event>& events) {
                 for (const Event& e : events) f.observe(e);
             })
        .def("ess", &ParticleFilter::ess)
        .def("log_marginal", &ParticleFilter::log_marginal)
        .def("n_observed", &ParticleFilter::n_observed)
        .def("t_last", &ParticleFilter::t_last)
        .def("map_summary",
             [](const ParticleFilter& f, std::size_t top_words) {
                 return summary_to_dict(f.map_summary(top_words));
             },
             py::arg("top_words") = 20)
        .def("rate_estimates",
             [](const ParticleFilter& f) {
                 const RateEstimates est =
                     f.map_particle().state.rate_estimates(f.t_last());
                 std::vector<std::vector<double>> alpha(static_cast<std::size_t>(est.U));
                 for (int v = 0; v < est.U; ++v) {
                     alpha[static_cast<std::size_t>(v)].assign(
                         est.alpha.begin() + static_cast<long>(v) * est.U,
                         est.alpha.begin() + static_cast<long>(v + 1) * est.U);
                 }
                 return py::make_tuple(est.mu, alpha);
             })
        .def("beta_estimates",
             [](const ParticleFilter& f) {
                 const auto& state = f.map_particle().state;
                 std::vector<double> betas;
                 for (const TopicAtom& atom : state.topics()) {
                     betas.push_back(state.beta_estimate(atom.id));
                 }
                 return betas;
             })
        .def("snapshot", [](const ParticleFilter& f) { return make_model_snapshot(f).dump(); })
        .def_static("from_snapshot",
                    [](const std::string& text, const std::vector<Event>& events) {
                        return filter_from_snapshot(nlohmann::json::parse(text), events);
                    },
                    py::arg("snapshot_json"), py::arg("events"));

    m.def("simulate",
          [](const std::string& config_json, std::optional<std::uint64_t> seed) {
              ExperimentConfig config =
                  ExperimentConfig::from_json(nlohmann::json::parse(config_json));
              if (seed) config.simulation.seed = *seed;
              const SimulationInputs inputs = build_simulation_inputs(config);
              const SimResult result =
                  simulate(config.hyperparams, inputs.mu, inputs.alpha, inputs.topics,
                           inputs.options, config.simulation.seed);
              return py::make_tuple(result.events, truth_to_dict(result.truth), result.t_end);
          },
          py::arg("config_json"), py::arg("seed") = std::nullopt,
          "Generate a synthetic stream; returns (events, truth, t_end)");

    m.def("hyperparams_from_json", [](const std::string& config_json) {
        return ExperimentConfig::from_json(nlohmann::json::parse(config_json)).hyperparams;
    });

    m.def("load_events", &load_events, py::arg("path"), py::arg("jitter_eps") = 1e-9);
    m.def("save_events", [](const std::string& path, const std::vector<Event>& events) {
        save_events_jsonl(path, events);
    });

    m.def("relative_error",
          [](const std::vector<double>& est, const std::vector<double>& truth) {
              return relative_error(est, truth);
          });
    m.def("adjusted_rand_index",
          [](const std::vector<int>& a, const std::vector<int>& b) {
              return adjusted_rand_index(a, b);
          });

    m.def("next_event_time_loglik",
          [](ParticleFilter& filter, const std::vector<Event>& held_out,
             std::int64_t horizon) {
              const auto rows = next_event_time_loglik(filter, held_out, horizon);
              std::vector<std::tuple<std::int64_t, double, UserId, double>> out;
              out.reserve(rows.size());
              for (const auto& r : rows) {
                  out.emplace_back(r.index, r.time, r.user, r.log_density);
              }
              return out;
          },
          py::arg("filter"), py::arg("held_out"), py::arg("horizon") = -1,
          "Rolling one-step-ahead scoring; folds each event into the filter");
}
