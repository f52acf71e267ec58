#include "probstab/serialization.hpp"

#include <map>

namespace probstab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <class F>
auto parsing(const char* what, F&& body) {
  try {
    return body();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
  }
}

std::string variant_of(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("variant")) {
    throw Error(ErrorKind::ParseError, std::string(what) + ": missing \"variant\"");
  }
  return j.at("variant").get<std::string>();
}

}  // namespace

Json filter_to_json(const FilterSpec& spec) {
  Json j;
  j["variant"] = filter_name(spec);
  std::visit(Overloaded{
                 [&](const SgcPowerFilter& f) { j["k"] = f.k; },
                 [&](const PolynomialAdjacencyFilter& f) { j["coeffs"] = f.coeffs; },
                 [&](const PolynomialLaplacianFilter& f) { j["coeffs"] = f.coeffs; },
                 [&](const LowPassFilter& f) { j["alpha"] = f.alpha; },
                 [&](const HeatDiffusionFilter& f) { j["tau"] = f.tau; },
                 [&](const GinConvFilter& f) { j["eps"] = f.eps; },
                 [](const auto&) {},
             },
             spec);
  return j;
}

FilterSpec filter_from_json(const Json& j) {
  return parsing("filter", [&]() -> FilterSpec {
    const std::string v = variant_of(j, "filter");
    FilterSpec spec;
    if (v == "adjacency") {
      spec = AdjacencyFilter{};
    } else if (v == "laplacian") {
      spec = LaplacianFilter{};
    } else if (v == "normalized_adjacency") {
      spec = NormalizedAdjacencyFilter{};
    } else if (v == "sgc") {
      spec = SgcPowerFilter{j.value("k", 1)};
    } else if (v == "polynomial_adjacency") {
      spec = PolynomialAdjacencyFilter{j.at("coeffs").get<std::vector<double>>()};
    } else if (v == "polynomial_laplacian") {
      spec = PolynomialLaplacianFilter{j.at("coeffs").get<std::vector<double>>()};
    } else if (v == "low_pass") {
      spec = LowPassFilter{j.value("alpha", 1.0)};
    } else if (v == "heat") {
      spec = HeatDiffusionFilter{j.value("tau", 1.0)};
    } else if (v == "gin") {
      spec = GinConvFilter{j.value("eps", 0.0)};
    } else {
      throw Error(ErrorKind::ParseError, "unknown filter variant '" + v + "'");
    }
    validate(spec);
    return spec;
  });
}

Json graph_model_to_json(const GraphModelSpec& spec) {
  Json j;
  std::visit(Overloaded{
                 [&](const SbmModel& m) {
                   j["variant"] = "sbm";
                   j["block_sizes"] = m.block_sizes;
                   j["p_in"] = m.p_in;
                   j["p_out"] = m.p_out;
                 },
                 [&](const BarabasiAlbertModel& m) {
                   j["variant"] = "ba";
                   j["n"] = m.n;
                   j["attach"] = m.attach;
                 },
                 [&](const WattsStrogatzModel& m) {
                   j["variant"] = "ws";
                   j["n"] = m.n;
                   j["k"] = m.k;
                   j["beta"] = m.beta;
                 },
                 [&](const SensorModel& m) {
                   j["variant"] = "sensor";
                   j["n"] = m.n;
                   j["radius"] = m.radius;
                 },
                 [&](const KarateClubModel&) { j["variant"] = "karate"; },
             },
             spec.model);
  j["seed"] = spec.seed;
  return j;
}

GraphModelSpec graph_model_from_json(const Json& j) {
  return parsing("graph", [&] {
    const std::string v = variant_of(j, "graph");
    GraphModelSpec spec;
    spec.seed = j.value("seed", std::uint64_t{0});
    if (v == "sbm") {
      spec.model = SbmModel{j.value("block_sizes", std::vector<int>{20, 20}), j.value("p_in", 0.4),
                            j.value("p_out", 0.05)};
    } else if (v == "ba") {
      spec.model = BarabasiAlbertModel{j.value("n", 50), j.value("attach", 3)};
    } else if (v == "ws") {
      spec.model = WattsStrogatzModel{j.value("n", 50), j.value("k", 4), j.value("beta", 0.2)};
    } else if (v == "sensor") {
      spec.model = SensorModel{j.value("n", 50), j.value("radius", 0.4)};
    } else if (v == "karate") {
      spec.model = KarateClubModel{};
    } else {
      throw Error(ErrorKind::ParseError, "unknown graph variant '" + v + "'");
    }
    validate(spec);
    return spec;
  });
}

SignalModelSpec signal_model_from_json(const Json& j, const std::optional<Graph>& graph) {
  return parsing("signals", [&] {
    const std::string v = variant_of(j, "signals");
    SignalModelSpec spec;
    spec.seed = j.value("seed", std::uint64_t{0});
    if (v == "csbm") {
      CsbmSignals m;
      if (j.contains("membership")) {
        m.membership = j.at("membership").get<std::vector<int>>();
      } else if (j.contains("block_sizes")) {
        m.membership = two_block_membership(j.at("block_sizes").get<std::vector<int>>());
      } else {
        throw Error(ErrorKind::ParseError, "csbm signals need \"membership\" or \"block_sizes\"");
      }
      m.mu = j.value("mu", 1.0);
      m.u = j.value("u", 1.0);
      spec.model = m;
    } else if (v == "smooth") {
      if (!graph) throw Error(ErrorKind::InvalidParameter, "smooth signals need a graph");
      spec.model = SmoothSignals{*graph, j.value("mean", 0.0), j.value("noise", 0.1)};
    } else if (v == "gaussian") {
      const int n = j.contains("n") ? j.at("n").get<int>() : (graph ? graph->n() : 0);
      spec.model = IsotropicGaussianSignals{n};
    } else if (v == "unit_sphere") {
      const int n = j.contains("n") ? j.at("n").get<int>() : (graph ? graph->n() : 0);
      spec.model = UnitSphereSignals{n};
    } else {
      throw Error(ErrorKind::ParseError, "unknown signal variant '" + v + "'");
    }
    validate(spec);
    return spec;
  });
}

Json signal_model_to_json(const SignalModelSpec& spec) {
  Json j;
  std::visit(Overloaded{
                 [&](const CsbmSignals& m) {
                   j["variant"] = "csbm";
                   j["membership"] = m.membership;
                   j["mu"] = m.mu;
                   j["u"] = m.u;
                 },
                 [&](const SmoothSignals& m) {
                   j["variant"] = "smooth";
                   j["mean"] = m.mean;
                   j["noise"] = m.noise;
                 },
                 [&](const IsotropicGaussianSignals& m) {
                   j["variant"] = "gaussian";
                   j["n"] = m.n;
                 },
                 [&](const UnitSphereSignals& m) {
                   j["variant"] = "unit_sphere";
                   j["n"] = m.n;
                 },
             },
             spec.model);
  j["seed"] = spec.seed;
  return j;
}

Json perturbation_to_json(const EdgePerturbation& p) {
  Json pairs = Json::array();
  for (const auto& sp : p.pairs()) pairs.push_back({sp.pair.u, sp.pair.v, sp.sign});
  return pairs;
}

EdgePerturbation perturbation_from_json(const Json& j) {
  return parsing("perturbation", [&] {
    std::vector<SignedPair> pairs;
    for (const auto& entry : j) {
      const auto values = entry.get<std::vector<int>>();
      if (values.size() != 3) {
        throw Error(ErrorKind::ParseError, "perturbation entries are [u, v, sign]");
      }
      pairs.push_back({VertexPair(values[0], values[1]), values[2]});
    }
    return EdgePerturbation(std::move(pairs));
  });
}

AttackConfig attack_config_from_json(const Json& j) {
  return parsing("attack config", [&] {
    AttackConfig cfg;
    cfg.budget = j.value("budget", std::size_t{1});
    cfg.max_iters = j.value("max_iters", 250);
    cfg.learning_rate = j.value("learning_rate", 0.0);
    cfg.tolerance = j.value("tolerance", 0.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    const std::string mode = j.value("gradient_mode", std::string("analytic"));
    if (mode == "analytic") {
      cfg.gradient_mode = GradientMode::Analytic;
    } else if (mode == "finite_difference") {
      cfg.gradient_mode = GradientMode::FiniteDifference;
    } else {
      throw Error(ErrorKind::ParseError, "unknown gradient_mode '" + mode + "'");
    }
    cfg.fd_step = j.value("fd_step", 1e-5);
    cfg.validate();
    return cfg;
  });
}

Json attack_config_to_json(const AttackConfig& cfg) {
  return Json{{"budget", cfg.budget},
              {"max_iters", cfg.max_iters},
              {"learning_rate", cfg.learning_rate},
              {"tolerance", cfg.tolerance},
              {"seed", cfg.seed},
              {"gradient_mode", to_string(cfg.gradient_mode)},
              {"fd_step", cfg.fd_step}};
}

Json attack_result_to_json(const AttackResult& r) {
  return Json{{"pairs", perturbation_to_json(r.perturbation)},
              {"m", r.perturbation.size()},
              {"objective", r.objective},
              {"iterations_used", r.iterations_used},
              {"converged", r.converged}};
}

Json report_to_json(const StabilityReport& r) {
  Json j{{"expected", r.expected}, {"worst_case", r.worst_case}, {"uniform_sphere", r.uniform_sphere}};
  if (r.per_sample) j["per_sample"] = *r.per_sample;
  return j;
}

}  // namespace probstab
