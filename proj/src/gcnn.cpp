#include "probstab/gcnn.hpp"

#include "probstab/io.hpp"
#include "probstab/rng.hpp"
#include "probstab/serialization.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

namespace probstab {

double Activation::lipschitz() const {
  switch (kind) {
    case ActivationKind::Sigmoid: return 0.25;
    case ActivationKind::LeakyReLU: return std::max(1.0, std::abs(slope));
    case ActivationKind::ReLU:
    case ActivationKind::Tanh:
    case ActivationKind::Identity: return 1.0;
  }
  return 1.0;
}

bool Activation::zero_preserving() const { return kind != ActivationKind::Sigmoid; }

Matrix Activation::apply(const Matrix& z) const {
  switch (kind) {
    case ActivationKind::ReLU: return z.cwiseMax(0.0);
    case ActivationKind::Sigmoid: return (1.0 + (-z.array()).exp()).inverse().matrix();
    case ActivationKind::Tanh: return z.array().tanh().matrix();
    case ActivationKind::LeakyReLU:
      return z.unaryExpr([s = slope](double x) { return x >= 0.0 ? x : s * x; });
    case ActivationKind::Identity: return z;
  }
  return z;
}

std::string Activation::name() const {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::LeakyReLU: return "leaky_relu";
    case ActivationKind::Identity: return "identity";
  }
  return "identity";
}

Activation Activation::parse(const std::string& name, double slope) {
  static const std::map<std::string, ActivationKind> kinds = {
      {"relu", ActivationKind::ReLU},
      {"sigmoid", ActivationKind::Sigmoid},
      {"tanh", ActivationKind::Tanh},
      {"leaky_relu", ActivationKind::LeakyReLU},
      {"identity", ActivationKind::Identity},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw Error(ErrorKind::InvalidParameter, "unknown activation '" + name + "'");
  return Activation{it->second, slope};
}

int GcnnModel::input_dim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weights.rows());
}

void GcnnModel::validate() const {
  if (layers.empty()) throw Error(ErrorKind::InvalidDims, "model needs at least one layer");
  for (std::size_t l = 1; l < layers.size(); ++l) {
    if (layers[l].weights.rows() != layers[l - 1].weights.cols()) {
      throw Error(ErrorKind::InvalidDims,
                  "layer " + std::to_string(l + 1) + " input dimension does not chain");
    }
  }
  probstab::validate(filter);
}

namespace {

// Builds each distinct layer filter once per graph.
class LayerFilters {
 public:
  LayerFilters(const GcnnModel& model, const Graph& g) {
    shared_ = build_filter(model.filter, g);
    for (const auto& layer : model.layers) {
      if (!layer.gin_eps || per_eps_.count(*layer.gin_eps)) continue;
      per_eps_.emplace(*layer.gin_eps, build_filter(GinConvFilter{*layer.gin_eps}, g));
    }
  }

  const Matrix& for_layer(const GcnnLayer& layer) const {
    return layer.gin_eps ? per_eps_.at(*layer.gin_eps) : shared_;
  }

 private:
  Matrix shared_;
  std::map<double, Matrix> per_eps_;
};

}  // namespace

std::vector<Matrix> forward(const GcnnModel& model, const Graph& g, const Matrix& signals) {
  model.validate();
  if (signals.rows() != g.n()) throw Error(ErrorKind::DimensionMismatch, "signal rows != n");
  if (signals.cols() != model.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "signal columns do not match the input dimension");
  }
  const LayerFilters filters(model, g);
  std::vector<Matrix> outputs;
  outputs.reserve(model.layers.size() + 1);
  outputs.push_back(signals);
  for (const auto& layer : model.layers) {
    const Matrix pre = filters.for_layer(layer) * outputs.back() * layer.weights;
    outputs.push_back(layer.activation.apply(pre));
  }
  return outputs;
}

std::vector<double> layerwise_perturbation(const GcnnModel& model, const Graph& g,
                                           const EdgePerturbation& p, const Matrix& signals) {
  const auto clean = forward(model, g, signals);
  const auto perturbed = forward(model, apply_perturbation(g, p), signals);
  std::vector<double> out;
  out.reserve(model.layers.size());
  for (std::size_t l = 1; l < clean.size(); ++l) {
    out.push_back((clean[l] - perturbed[l]).squaredNorm());
  }
  return out;
}

GcnnModel random_model(const FilterSpec& filter, const std::vector<int>& dims,
                       const Activation& activation, std::uint64_t seed) {
  if (dims.size() < 2) throw Error(ErrorKind::InvalidDims, "need at least (d_0, d_1)");
  for (int d : dims) {
    if (d < 1) throw Error(ErrorKind::InvalidDims, "layer dimensions must be >= 1");
  }
  GcnnModel model;
  model.filter = filter;
  model.seed = seed;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    auto rng = SplitMix64::substream(seed, l);
    Matrix w(dims[l], dims[l + 1]);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.normal();
    }
    model.layers.push_back({std::move(w), activation, std::nullopt});
  }
  model.validate();
  return model;
}

void save_model(const GcnnModel& model, const std::string& stem) {
  model.validate();
  Json header;
  std::vector<int> dims{model.input_dim()};
  Json layers = Json::array();
  const std::string base = std::filesystem::path(stem).filename().string();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    dims.push_back(static_cast<int>(layer.weights.cols()));
    const std::string file = base + ".layer" + std::to_string(l + 1) + ".csv";
    write_matrix_csv_file(stem + ".layer" + std::to_string(l + 1) + ".csv", layer.weights, "w");
    Json entry = {{"activation", layer.activation.name()}, {"weights", file}};
    if (layer.activation.kind == ActivationKind::LeakyReLU) entry["slope"] = layer.activation.slope;
    if (layer.gin_eps) entry["gin_eps"] = *layer.gin_eps;
    layers.push_back(entry);
  }
  header["dims"] = dims;
  header["filter"] = filter_to_json(model.filter);
  header["seed"] = model.seed;
  header["layers"] = layers;
  write_text_file(stem + ".json", header.dump(2) + "\n");
}

GcnnModel load_model(const std::string& json_path) {
  Json header;
  try {
    header = Json::parse(read_text_file(json_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, json_path + ": " + e.what());
  }
  const auto dir = std::filesystem::path(json_path).parent_path();
  GcnnModel model;
  try {
    model.filter = filter_from_json(header.at("filter"));
    model.seed = header.value("seed", std::uint64_t{0});
    const auto dims = header.at("dims").get<std::vector<int>>();
    const auto& layers = header.at("layers");
    if (dims.size() != layers.size() + 1) {
      throw Error(ErrorKind::InvariantViolation, "dims must have one more entry than layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& entry = layers[l];
      GcnnLayer layer;
      layer.activation = Activation::parse(entry.at("activation").get<std::string>(),
                                           entry.value("slope", 0.01));
      layer.weights = read_matrix_csv_file((dir / entry.at("weights").get<std::string>()).string());
      if (entry.contains("gin_eps")) layer.gin_eps = entry.at("gin_eps").get<double>();
      if (layer.weights.rows() != dims[l] || layer.weights.cols() != dims[l + 1]) {
        throw Error(ErrorKind::InvariantViolation,
                    "layer " + std::to_string(l + 1) + " weights do not match declared dims");
      }
      model.layers.push_back(std::move(layer));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, json_path + ": " + e.what());
  }
  model.validate();
  return model;
}

}  // namespace probstab
