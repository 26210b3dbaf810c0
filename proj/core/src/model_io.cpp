#include "credkit/model_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "credkit/csv.hpp"
#include "credkit/errors.hpp"

namespace credkit::model {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& nd : tree.nodes) {
    if (nd.feature >= 0) {
      nodes.push_back({{"feature", nd.feature},
                       {"threshold", nd.threshold},
                       {"left", nd.left},
                       {"right", nd.right}});
    } else {
      nodes.push_back({{"leaf_value", nd.leaf_value}});
    }
  }
  return nodes;
}

RegressionTree tree_from_json(const json& nodes) {
  RegressionTree tree;
  for (const auto& nd : nodes) {
    TreeNode out;
    if (nd.contains("feature")) {
      out.feature = nd.at("feature").get<int>();
      out.threshold = nd.at("threshold").get<double>();
      out.left = nd.at("left").get<int>();
      out.right = nd.at("right").get<int>();
    } else {
      out.leaf_value = nd.at("leaf_value").get<double>();
    }
    tree.nodes.push_back(out);
  }
  return tree;
}

}  // namespace

void save_hybrid(const HybridModel& model, const TrainConfig& config, const std::string& path) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["weight_gbt"] = model.weight_gbt;
  doc["trained_on_quarter"] = model.trained_on_quarter;

  json gbt;
  gbt["shrinkage"] = model.gbt.shrinkage;
  gbt["base_score"] = model.gbt.base_score;
  gbt["leaf_reg"] = model.gbt.leaf_reg;
  gbt["degenerate"] = model.gbt.degenerate;
  gbt["trees"] = json::array();
  for (const auto& tree : model.gbt.trees) gbt["trees"].push_back(tree_to_json(tree));
  doc["gbt"] = std::move(gbt);

  json mlp;
  mlp["layer_sizes"] = model.mlp.layer_sizes;
  mlp["weights"] = model.mlp.weights;  // row-major per layer
  mlp["biases"] = model.mlp.biases;
  mlp["input_mean"] = model.mlp.input_mean;
  mlp["input_scale"] = model.mlp.input_scale;
  doc["mlp"] = std::move(mlp);

  json cfg;
  cfg["seed"] = config.seed;
  cfg["val_fraction"] = config.val_fraction;
  cfg["weight_grid_step"] = config.weight_grid_step;
  cfg["gbt"] = {{"n_trees", config.gbt.n_trees},
                {"max_depth", config.gbt.max_depth},
                {"shrinkage", config.gbt.shrinkage},
                {"leaf_reg", config.gbt.leaf_reg},
                {"min_leaf", config.gbt.min_leaf}};
  cfg["mlp"] = {{"hidden1", config.mlp.hidden1},
                {"hidden2", config.mlp.hidden2},
                {"learning_rate", config.mlp.learning_rate},
                {"epochs", config.mlp.epochs},
                {"batch_size", config.mlp.batch_size},
                {"seed", config.mlp.seed},
                {"standardize", config.mlp.standardize}};
  doc["config"] = std::move(cfg);

  csv::Writer w(path);
  w.write_line(doc.dump(2));
  w.close();
}

LoadedHybrid load_hybrid(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::missing_input, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    fail(Errc::parse_error, path + ": " + e.what());
  }
  if (!doc.contains("format_version") || doc.at("format_version").get<int>() != kFormatVersion) {
    fail(Errc::schema_error, path + ": unsupported model format version");
  }

  LoadedHybrid out;
  out.model.weight_gbt = doc.at("weight_gbt").get<double>();
  out.model.trained_on_quarter = doc.at("trained_on_quarter").get<int>();

  const json& gbt = doc.at("gbt");
  out.model.gbt.shrinkage = gbt.at("shrinkage").get<double>();
  out.model.gbt.base_score = gbt.at("base_score").get<double>();
  out.model.gbt.leaf_reg = gbt.at("leaf_reg").get<double>();
  out.model.gbt.degenerate = gbt.at("degenerate").get<bool>();
  for (const auto& tree : gbt.at("trees")) out.model.gbt.trees.push_back(tree_from_json(tree));

  const json& mlp = doc.at("mlp");
  out.model.mlp.layer_sizes = mlp.at("layer_sizes").get<std::vector<int>>();
  out.model.mlp.weights = mlp.at("weights").get<std::vector<std::vector<double>>>();
  out.model.mlp.biases = mlp.at("biases").get<std::vector<std::vector<double>>>();
  out.model.mlp.input_mean = mlp.at("input_mean").get<std::vector<double>>();
  out.model.mlp.input_scale = mlp.at("input_scale").get<std::vector<double>>();

  const json& cfg = doc.at("config");
  out.config.seed = cfg.at("seed").get<std::uint64_t>();
  out.config.val_fraction = cfg.at("val_fraction").get<double>();
  out.config.weight_grid_step = cfg.at("weight_grid_step").get<double>();
  const json& gcfg = cfg.at("gbt");
  out.config.gbt.n_trees = gcfg.at("n_trees").get<int>();
  out.config.gbt.max_depth = gcfg.at("max_depth").get<int>();
  out.config.gbt.shrinkage = gcfg.at("shrinkage").get<double>();
  out.config.gbt.leaf_reg = gcfg.at("leaf_reg").get<double>();
  out.config.gbt.min_leaf = gcfg.at("min_leaf").get<int>();
  const json& mcfg = cfg.at("mlp");
  out.config.mlp.hidden1 = mcfg.at("hidden1").get<int>();
  out.config.mlp.hidden2 = mcfg.at("hidden2").get<int>();
  out.config.mlp.learning_rate = mcfg.at("learning_rate").get<double>();
  out.config.mlp.epochs = mcfg.at("epochs").get<int>();
  out.config.mlp.batch_size = mcfg.at("batch_size").get<int>();
  out.config.mlp.seed = mcfg.at("seed").get<std::uint64_t>();
  out.config.mlp.standardize = mcfg.at("standardize").get<bool>();
  return out;
}

}  // namespace credkit::model
