#include "probstab/attacks.hpp"
#include "probstab/experiments.hpp"
#include "probstab/gcnn.hpp"
#include "probstab/generators.hpp"
#include "probstab/io.hpp"
#include "probstab/serialization.hpp"
#include "probstab/stability.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace probstab;

namespace {

constexpr const char* kSynopsis =
    "usage: probstab <command> --config <json> [--seed <n>] [--out <path>]\n"
    "commands:\n"
    "  generate-graph    sample a graph model, write an edge list\n"
    "  generate-signals  sample graph signals, write a CSV (rows = vertices)\n"
    "  estimate-k        empirical or analytic second moment, write a CSV\n"
    "  stability         expected / worst-case / uniform-sphere perturbation report\n"
    "  attack            random, wst_pgd, prob_pgd, brute_force, remark_a, remark_l\n"
    "  experiment        run a canned experiment and write a result bundle\n";

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct Loaded {
  Json json;
  fs::path dir;
};

Loaded load_config(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  return {j, fs::path(path).parent_path()};
}

std::string resolve(const Loaded& cfg, const std::string& key) {
  const fs::path p = cfg.json.at(key).get<std::string>();
  return p.is_absolute() ? p.string() : (cfg.dir / p).string();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

Graph load_graph(const Loaded& cfg, std::optional<std::uint64_t> seed) {
  if (cfg.json.contains("graph_file")) return read_edge_list_file(resolve(cfg, "graph_file"));
  if (!cfg.json.contains("graph")) {
    throw Error(ErrorKind::InvalidParameter, "config needs \"graph\" or \"graph_file\"");
  }
  GraphModelSpec spec = graph_model_from_json(cfg.json.at("graph"));
  if (seed) spec.seed = *seed;
  return generate_graph(spec);
}

SignalModelSpec signal_spec(const Loaded& cfg, const Graph& g, std::optional<std::uint64_t> seed) {
  SignalModelSpec spec = signal_model_from_json(cfg.json.at("signals"), g);
  if (seed) spec.seed = *seed;
  return spec;
}

// K from a CSV, from a signal file, analytically, or from sampled signals.
SecondMoment load_moment(const Loaded& cfg, const Graph& g, std::optional<Matrix>* signals_out) {
  const auto& j = cfg.json;
  if (j.contains("k_file")) return SecondMoment(read_matrix_csv_file(resolve(cfg, "k_file")));
  if (j.contains("signals_file")) {
    Matrix x = read_matrix_csv_file(resolve(cfg, "signals_file"));
    SecondMoment k = empirical_second_moment(x);
    if (signals_out) *signals_out = std::move(x);
    return k;
  }
  if (j.contains("signals")) {
    const SignalModelSpec spec = signal_spec(cfg, g, std::nullopt);
    if (j.value("second_moment", std::string("empirical")) == "analytic") {
      return analytic_second_moment(spec);
    }
    Matrix x = sample_signals(spec, j.value("signal_count", 100));
    SecondMoment k = empirical_second_moment(x);
    if (signals_out) *signals_out = std::move(x);
    return k;
  }
  throw Error(ErrorKind::InvalidParameter,
              "config needs one of \"k_file\", \"signals_file\" or \"signals\"");
}

int generate_graph_cmd(const Options& o) {
  const Loaded cfg = load_config(o.config);
  GraphModelSpec spec = graph_model_from_json(cfg.json.contains("graph") ? cfg.json.at("graph") : cfg.json);
  if (o.seed) spec.seed = *o.seed;
  std::ostringstream text;
  write_edge_list(text, generate_graph(spec));
  emit(o.out, text.str());
  return 0;
}

int generate_signals_cmd(const Options& o) {
  const Loaded cfg = load_config(o.config);
  const Graph g = load_graph(cfg, std::nullopt);
  const SignalModelSpec spec = signal_spec(cfg, g, o.seed);
  std::ostringstream text;
  write_matrix_csv(text, sample_signals(spec, cfg.json.value("signal_count", 100)), "x");
  emit(o.out, text.str());
  return 0;
}

int estimate_k_cmd(const Options& o) {
  const Loaded cfg = load_config(o.config);
  SecondMoment k;
  if (cfg.json.contains("signals_file")) {
    k = empirical_second_moment(read_matrix_csv_file(resolve(cfg, "signals_file")));
  } else {
    const Graph g = load_graph(cfg, std::nullopt);
    const SignalModelSpec spec = signal_spec(cfg, g, o.seed);
    if (cfg.json.value("second_moment", std::string("empirical")) == "analytic") {
      k = analytic_second_moment(spec);
    } else {
      k = empirical_second_moment(sample_signals(spec, cfg.json.value("signal_count", 100)));
    }
  }
  std::ostringstream text;
  write_matrix_csv(text, k.matrix(), "k");
  emit(o.out, text.str());
  return 0;
}

int stability_cmd(const Options& o) {
  const Loaded cfg = load_config(o.config);
  const Graph g = load_graph(cfg, o.seed);
  const FilterSpec filter = filter_from_json(cfg.json.at("filter"));
  const EdgePerturbation p = perturbation_from_json(cfg.json.at("perturbation"));
  std::optional<Matrix> signals;
  const SecondMoment k = load_moment(cfg, g, &signals);
  const Matrix e = filter_perturbation(filter, g, p).E;
  const bool per_sample = cfg.json.value("per_sample", true);
  const StabilityReport report =
      stability_report(k, e, g.n(), per_sample ? signals : std::nullopt);
  Json out = report_to_json(report);
  out["filter"] = filter_to_json(filter);
  out["pairs"] = perturbation_to_json(p);
  if (cfg.json.contains("markov_c")) {
    const TailBound tail = markov_tail(report.expected, cfg.json.at("markov_c").get<double>());
    out["markov"] = {{"threshold", tail.threshold}, {"probability", tail.probability}};
  }
  if (cfg.json.contains("model_file")) {
    if (!signals) throw Error(ErrorKind::InvalidParameter, "model analysis needs signals");
    const GcnnModel model = load_model(resolve(cfg, "model_file"));
    const double measured = filter_norm_bound(model.filter, g, p);
    const double c = cfg.json.value("filter_norm", measured);
    const Matrix model_e = filter_perturbation(model.filter, g, p).E;
    out["layerwise"] = layerwise_perturbation(model, g, p, *signals);
    out["multilayer_bound"] = multilayer_bound(empirical_second_moment(*signals), model_e, model, c,
                                               static_cast<int>(signals->cols()), measured);
  }
  emit(o.out, out.dump(2) + "\n");
  return 0;
}

int attack_cmd(const Options& o) {
  const Loaded cfg = load_config(o.config);
  const Graph g = load_graph(cfg, std::nullopt);
  const FilterSpec filter = filter_from_json(cfg.json.value("filter", Json{{"variant", "adjacency"}}));
  AttackConfig attack = attack_config_from_json(cfg.json.value("attack", Json::object()));
  if (o.seed) attack.seed = *o.seed;
  const std::string method = cfg.json.value("method", std::string("prob_pgd"));

  AttackResult result;
  if (method == "wst_pgd") {
    result = wst_pgd(g, filter, attack);
  } else {
    const SecondMoment k = load_moment(cfg, g, nullptr);
    if (method == "prob_pgd") {
      result = prob_pgd(g, filter, k, attack);
    } else if (method == "brute_force") {
      result = brute_force_attack(g, filter, k, attack.budget);
    } else if (method == "random" || method == "remark_a" || method == "remark_l") {
      result.perturbation =
          method == "random"
              ? random_attack(g, attack.budget, attack.seed)
              : structural_heuristic(k, g, attack.budget,
                                     method == "remark_a" ? HeuristicMode::RemarkA
                                                          : HeuristicMode::RemarkL);
      result.objective = attack_objective(g, filter, k, result.perturbation);
      result.trace = {result.objective};
      result.iterations_used = 0;
    } else {
      throw Error(ErrorKind::InvalidParameter, "unknown attack method '" + method + "'");
    }
  }
  Json out{{"method", method}, {"filter", filter_to_json(filter)}};
  out.update(attack_result_to_json(result));
  emit(o.out, out.dump(2) + "\n");
  if (!o.out.empty()) {
    Matrix trace(static_cast<Eigen::Index>(result.trace.size()), 2);
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      trace(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i + 1);
      trace(static_cast<Eigen::Index>(i), 1) = result.trace[i];
    }
    write_matrix_csv_file(o.out + ".trace.csv", trace, "c");
  }
  return 0;
}

int experiment_cmd(const Options& o) {
  const Loaded cfg = load_config(o.config);
  Json j = cfg.json;
  if (o.seed) j["seed"] = *o.seed;
  ExperimentSpec spec = experiment_from_json(j);
  if (!o.out.empty()) {
    spec.output_dir = o.out;
  } else if (!fs::path(spec.output_dir).is_absolute()) {
    spec.output_dir = (cfg.dir / spec.output_dir).string();
  }
  const Json manifest = run_experiment(spec);
  std::cout << manifest.at("summary").dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic stability analysis and attacks for graph filters"};
  app.require_subcommand(1);
  app.set_help_flag("-h,--help");

  Options opts;
  std::uint64_t seed = 0;
  const std::vector<std::pair<std::string, int (*)(const Options&)>> commands = {
      {"generate-graph", generate_graph_cmd}, {"generate-signals", generate_signals_cmd},
      {"estimate-k", estimate_k_cmd},         {"stability", stability_cmd},
      {"attack", attack_cmd},                 {"experiment", experiment_cmd},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the seed");
    sub->add_option("--out", opts.out, "output path (stdout when omitted)");
    subs.push_back(sub);
  }

  if (argc > 1 && argv[1][0] != '-') {
    const std::string name = argv[1];
    const bool known = std::any_of(commands.begin(), commands.end(),
                                   [&](const auto& c) { return c.first == name; });
    if (!known) {
      std::cerr << "error: unknown command '" << name << "'\n" << kSynopsis;
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << kSynopsis;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << kSynopsis;
    return 1;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    if (subs[i]->count("--seed")) opts.seed = seed;
    try {
      return commands[i].second(opts);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: ParseError: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  std::cerr << kSynopsis;
  return 1;
}
