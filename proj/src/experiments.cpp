#include "probstab/experiments.hpp"

#include "probstab/gcnn.hpp"
#include "probstab/io.hpp"
#include "probstab/linalg.hpp"
#include "probstab/rng.hpp"
#include "probstab/stability.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

namespace probstab {

namespace {

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names = {
      {"filter_attack_comparison", ExperimentKind::FilterAttackComparison},
      {"gcnn_depth", ExperimentKind::GcnnDepth},
      {"rank_gap", ExperimentKind::RankGap},
      {"csbm_case_study", ExperimentKind::CsbmCaseStudy},
  };
  return names;
}

// Runs job(0..count-1) on up to `workers` threads; results keep index order.
template <class R>
std::vector<R> run_ordered(std::size_t count, unsigned workers, const std::function<R(std::size_t)>& job) {
  std::vector<R> results(count);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          results[i] = job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return SplitMix64::substream(seed, trial)();
}

SignalModelSpec resolve_signals(const ExperimentSpec& spec, const Graph& g, std::size_t trial) {
  SignalModelSpec s = signal_model_from_json(spec.signals, g);
  s.seed = trial_seed(s.seed, trial);
  if (signal_dimension(s) != g.n()) {
    throw Error(ErrorKind::DimensionMismatch, "signal model dimension differs from the graph size");
  }
  return s;
}

SecondMoment second_moment(const ExperimentSpec& spec, const SignalModelSpec& signals,
                           const Matrix& x) {
  return spec.moment == MomentSource::Analytic ? analytic_second_moment(signals)
                                               : empirical_second_moment(x);
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

class Bundle {
 public:
  explicit Bundle(const ExperimentSpec& spec) : dir_(spec.output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create '" + dir_.string() + "': " + ec.message());
    manifest_["experiment"] = to_string(spec.kind);
    manifest_["config"] = experiment_to_json(spec);
    manifest_["files"] = Json::array();
  }

  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<double>>& rows) {
    std::string text;
    for (std::size_t c = 0; c < columns.size(); ++c) text += (c ? "," : "") + columns[c];
    text += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) text += (c ? "," : "") + format_double(row[c]);
      text += '\n';
    }
    write_text_file((dir_ / name).string(), text);
    manifest_["files"].push_back(name);
  }

  Json& summary() { return manifest_["summary"]; }
  Json& manifest() { return manifest_; }

  Json finish() {
    write_text_file((dir_ / "manifest.json").string(), manifest_.dump(2) + "\n");
    return manifest_;
  }

 private:
  std::filesystem::path dir_;
  Json manifest_;
};

struct ComparisonTrial {
  std::vector<std::vector<double>> per_sample;
  std::vector<double> objectives;
  std::vector<double> prob_trace;
  std::vector<double> wst_trace;
};

Json filter_attack_comparison(const ExperimentSpec& spec, unsigned workers) {
  const Graph g = generate_graph(spec.graph);
  const auto trials = run_ordered<ComparisonTrial>(
      static_cast<std::size_t>(spec.trials), workers, [&](std::size_t t) {
        const SignalModelSpec signals = resolve_signals(spec, g, t);
        const Matrix x = sample_signals(signals, spec.signal_count);
        const SecondMoment k = second_moment(spec, signals, x);
        AttackConfig cfg = spec.attack;
        cfg.seed = trial_seed(spec.seed, t);
        const EdgePerturbation random = random_attack(g, cfg.budget, cfg.seed);
        const AttackResult wst = wst_pgd(g, spec.filter, cfg);
        const AttackResult prob = prob_pgd(g, spec.filter, k, cfg);
        ComparisonTrial out;
        std::vector<std::vector<double>> samples;
        for (const auto* p : {&random, &wst.perturbation, &prob.perturbation}) {
          const Matrix e = filter_perturbation(spec.filter, g, *p).E;
          samples.push_back(per_sample_perturbations(e, x));
          out.objectives.push_back(expected_perturbation(k, e));
        }
        for (std::size_t i = 0; i < samples[0].size(); ++i) {
          out.per_sample.push_back({static_cast<double>(t), static_cast<double>(i), samples[0][i],
                                    samples[1][i], samples[2][i]});
        }
        out.prob_trace = prob.trace;
        out.wst_trace = wst.trace;
        return out;
      });

  Bundle bundle(spec);
  std::vector<std::vector<double>> per_sample, objectives, prob_trace, wst_trace;
  std::vector<double> means[3];
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& row : trials[t].per_sample) {
      per_sample.push_back(row);
      for (int m = 0; m < 3; ++m) means[m].push_back(row[2 + m]);
    }
    std::vector<double> row{static_cast<double>(t)};
    row.insert(row.end(), trials[t].objectives.begin(), trials[t].objectives.end());
    objectives.push_back(row);
    for (std::size_t i = 0; i < trials[t].prob_trace.size(); ++i) {
      prob_trace.push_back({static_cast<double>(t), static_cast<double>(i + 1), trials[t].prob_trace[i]});
    }
    for (std::size_t i = 0; i < trials[t].wst_trace.size(); ++i) {
      wst_trace.push_back({static_cast<double>(t), static_cast<double>(i + 1), trials[t].wst_trace[i]});
    }
  }
  bundle.table("per_sample.csv", {"trial", "sample", "random", "wst_pgd", "prob_pgd"}, per_sample);
  bundle.table("objectives.csv", {"trial", "random", "wst_pgd", "prob_pgd"}, objectives);
  bundle.table("trace_prob_pgd.csv", {"trial", "iteration", "objective"}, prob_trace);
  bundle.table("trace_wst_pgd.csv", {"trial", "iteration", "objective"}, wst_trace);
  bundle.summary() = Json{{"mean_per_sample",
                           {{"random", mean(means[0])},
                            {"wst_pgd", mean(means[1])},
                            {"prob_pgd", mean(means[2])}}}};
  return bundle.finish();
}

Json gcnn_depth(const ExperimentSpec& spec, unsigned workers) {
  const Graph g = generate_graph(spec.graph);
  const SignalModelSpec signals = resolve_signals(spec, g, 0);
  const Matrix x = sample_signals(signals, spec.signal_count);
  const SecondMoment k_emp = empirical_second_moment(x);
  const SecondMoment k_attack = second_moment(spec, signals, x);
  AttackConfig cfg = spec.attack;
  cfg.seed = spec.seed;
  const std::vector<EdgePerturbation> perts = {
      random_attack(g, cfg.budget, cfg.seed), wst_pgd(g, spec.filter, cfg).perturbation,
      prob_pgd(g, spec.filter, k_attack, cfg).perturbation};
  std::vector<Matrix> es;
  std::vector<double> norms;
  for (const auto& p : perts) {
    es.push_back(filter_perturbation(spec.filter, g, p).E);
    norms.push_back(filter_norm_bound(spec.filter, g, p));
  }
  const int d = static_cast<int>(x.cols());
  const int width = spec.hidden_dim > 0 ? spec.hidden_dim : d;
  std::vector<int> dims{d};
  for (int l = 0; l < spec.layers; ++l) dims.push_back(width);
  const Activation act = Activation::parse(spec.activation);

  using Rows = std::vector<std::vector<double>>;
  const auto draws = run_ordered<Rows>(static_cast<std::size_t>(spec.trials), workers,
                                       [&](std::size_t t) {
    const GcnnModel model = random_model(spec.filter, dims, act, trial_seed(spec.seed, t));
    Rows rows;
    for (std::size_t m = 0; m < perts.size(); ++m) {
      const auto measured = layerwise_perturbation(model, g, perts[m], x);
      for (int l = 1; l <= model.depth(); ++l) {
        GcnnModel prefix = model;
        prefix.layers.resize(static_cast<std::size_t>(l));
        const double bound = multilayer_bound(k_emp, es[m], prefix, norms[m], d, norms[m]);
        rows.push_back({static_cast<double>(t), static_cast<double>(l), static_cast<double>(m),
                        measured[static_cast<std::size_t>(l - 1)], bound});
      }
    }
    return rows;
  });

  Bundle bundle(spec);
  Rows all;
  std::size_t violations = 0;
  for (const auto& rows : draws) {
    for (const auto& r : rows) {
      all.push_back(r);
      if (r[3] > r[4]) ++violations;
    }
  }
  bundle.table("layers.csv", {"draw", "layer", "method", "measured", "bound"}, all);
  bundle.summary() = Json{{"methods", {"random", "wst_pgd", "prob_pgd"}},
                          {"bound_violations", violations}};
  return bundle.finish();
}

Json rank_gap(const ExperimentSpec& spec, unsigned workers) {
  const int n = spec.rank_dim;
  auto rng = SplitMix64::substream(spec.seed, 0);
  Matrix e(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) e(i, j) = rng.normal();
  }
  const Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const SecondMoment uniform_k(Matrix::Identity(n, n) / n);
  using Row = std::vector<double>;
  const auto rows = run_ordered<Row>(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
    const int r = static_cast<int>(i) + 1;
    const Matrix er = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
                      svd.matrixV().leftCols(r).transpose();
    const double s = spectral_norm(er);
    return Row{static_cast<double>(r), frobenius_norm_sq(er) / n, s * s,
               expected_perturbation(uniform_k, er)};
  });
  Bundle bundle(spec);
  bundle.table("rank_sweep.csv", {"rank", "uniform_sphere", "worst_case", "expected_uniform_k"},
               rows);
  bundle.summary() = Json{{"n", n}, {"top_singular_value", svd.singularValues()(0)}};
  return bundle.finish();
}

Json csbm_case_study(const ExperimentSpec& spec, unsigned workers) {
  const Graph g = generate_graph(spec.graph);
  const SignalModelSpec signals = resolve_signals(spec, g, 0);
  const Matrix x = sample_signals(signals, spec.signal_count);
  const SecondMoment k = second_moment(spec, signals, x);
  const std::size_t m = spec.attack.budget;
  const FilterSpec adjacency = AdjacencyFilter{};
  const FilterSpec lap = LaplacianFilter{};
  const double remark_a =
      attack_objective(g, adjacency, k, structural_heuristic(k, g, m, HeuristicMode::RemarkA));
  const double remark_l =
      attack_objective(g, lap, k, structural_heuristic(k, g, m, HeuristicMode::RemarkL));

  using Row = std::vector<double>;
  const auto rows = run_ordered<Row>(static_cast<std::size_t>(spec.trials), workers,
                                     [&](std::size_t t) {
    AttackConfig cfg = spec.attack;
    cfg.seed = trial_seed(spec.seed, t);
    const EdgePerturbation random = random_attack(g, m, cfg.seed);
    return Row{static_cast<double>(t), attack_objective(g, adjacency, k, random),
               attack_objective(g, lap, k, random), prob_pgd(g, adjacency, k, cfg).objective,
               prob_pgd(g, lap, k, cfg).objective};
  });
  Bundle bundle(spec);
  bundle.table("objectives.csv",
               {"trial", "random_adjacency", "random_laplacian", "prob_pgd_adjacency",
                "prob_pgd_laplacian"},
               rows);
  bundle.table("heuristics.csv", {"remark_a_adjacency", "remark_l_laplacian"}, {{remark_a, remark_l}});
  std::vector<double> ra, rl;
  for (const auto& r : rows) {
    ra.push_back(r[1]);
    rl.push_back(r[2]);
  }
  bundle.summary() = Json{{"remark_a_adjacency", remark_a},
                          {"remark_l_laplacian", remark_l},
                          {"random_adjacency_mean", mean(ra)},
                          {"random_laplacian_mean", mean(rl)}};
  return bundle.finish();
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kind_names()) {
    if (k == kind) return name;
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
  if (signal_count < 1) throw Error(ErrorKind::InvalidParameter, "signal_count must be >= 1");
  if (layers < 1) throw Error(ErrorKind::InvalidParameter, "layers must be >= 1");
  if (hidden_dim < 0) throw Error(ErrorKind::InvalidParameter, "hidden_dim must be >= 0");
  if (rank_dim < 1) throw Error(ErrorKind::InvalidParameter, "rank_dim must be >= 1");
  probstab::validate(graph);
  probstab::validate(filter);
  attack.validate();
  Activation::parse(activation);
}

ExperimentSpec experiment_from_json(const Json& j) {
  ExperimentSpec spec;
  try {
    const std::string name = j.at("experiment").get<std::string>();
    const auto it = kind_names().find(name);
    if (it == kind_names().end()) {
      throw Error(ErrorKind::ParseError, "unknown experiment '" + name + "'");
    }
    spec.kind = it->second;
    spec.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("graph")) {
      Json graph = j.at("graph");
      if (!graph.contains("seed")) graph["seed"] = spec.seed;
      spec.graph = graph_model_from_json(graph);
    }
    if (j.contains("signals")) spec.signals = j.at("signals");
    if (!spec.signals.contains("seed")) spec.signals["seed"] = spec.seed;
    if (j.contains("filter")) spec.filter = filter_from_json(j.at("filter"));
    if (j.contains("attack")) spec.attack = attack_config_from_json(j.at("attack"));
    const std::string moment = j.value("second_moment", std::string("empirical"));
    if (moment == "empirical") {
      spec.moment = MomentSource::Empirical;
    } else if (moment == "analytic") {
      spec.moment = MomentSource::Analytic;
    } else {
      throw Error(ErrorKind::ParseError, "second_moment must be 'empirical' or 'analytic'");
    }
    spec.signal_count = j.value("signal_count", spec.signal_count);
    spec.trials = j.value("trials", spec.trials);
    spec.layers = j.value("layers", spec.layers);
    spec.activation = j.value("activation", spec.activation);
    spec.hidden_dim = j.value("hidden_dim", spec.hidden_dim);
    spec.rank_dim = j.value("rank_dim", spec.rank_dim);
    spec.output_dir = j.value("output_dir", spec.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("experiment: ") + e.what());
  }
  spec.validate();
  return spec;
}

Json experiment_to_json(const ExperimentSpec& spec) {
  return Json{{"experiment", to_string(spec.kind)},
              {"seed", spec.seed},
              {"graph", graph_model_to_json(spec.graph)},
              {"signals", spec.signals},
              {"filter", filter_to_json(spec.filter)},
              {"attack", attack_config_to_json(spec.attack)},
              {"second_moment", spec.moment == MomentSource::Analytic ? "analytic" : "empirical"},
              {"signal_count", spec.signal_count},
              {"trials", spec.trials},
              {"layers", spec.layers},
              {"activation", spec.activation},
              {"hidden_dim", spec.hidden_dim},
              {"rank_dim", spec.rank_dim}};
}

Json run_experiment(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();
  switch (spec.kind) {
    case ExperimentKind::FilterAttackComparison: return filter_attack_comparison(spec, workers);
    case ExperimentKind::GcnnDepth: return gcnn_depth(spec, workers);
    case ExperimentKind::RankGap: return rank_gap(spec, workers);
    case ExperimentKind::CsbmCaseStudy: return csbm_case_study(spec, workers);
  }
  throw Error(ErrorKind::InvalidParameter, "unknown experiment kind");
}

}  // namespace probstab
