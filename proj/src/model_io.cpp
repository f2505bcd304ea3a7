#include "model_io.hpp"

#include "feature_table.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

namespace hostscope {

using nlohmann::json;

namespace {

json node_to_json(const Tree& tree, std::uint32_t id) {
  const auto& n = tree.nodes[id];
  if (n.is_leaf()) return {{"c", {n.counts[0], n.counts[1]}}};
  return {{"f", n.feature}, {"t", n.threshold}, {"l", node_to_json(tree, n.left)}, {"r", node_to_json(tree, n.right)}};
}

[[noreturn]] void corrupt(const std::string& what) { fail(errc::corrupt, "corrupt model: " + what); }

template <class T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) corrupt(fmt::format("missing '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    corrupt(fmt::format("bad value for '{}'", key));
  }
}

std::uint32_t node_from_json(const json& j, std::size_t width, Tree& tree, int depth) {
  if (depth > 10000) corrupt("tree too deep");
  if (!j.is_object()) corrupt("tree node is not an object");
  const auto id = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("c")) {
    const auto counts = get<std::vector<std::uint64_t>>(j, "c");
    if (counts.size() != 2 || counts[0] + counts[1] == 0) corrupt("leaf counts");
    tree.nodes[id].counts = {counts[0], counts[1]};
    return id;
  }
  const auto feature = get<std::int64_t>(j, "f");
  if (feature < 0 || static_cast<std::size_t>(feature) >= width) corrupt(fmt::format("feature index {}", feature));
  const auto threshold = get<double>(j, "t");
  if (!j.contains("l") || !j.contains("r")) corrupt("internal node without children");
  const auto left = node_from_json(j["l"], width, tree, depth + 1);
  const auto right = node_from_json(j["r"], width, tree, depth + 1);
  auto& n = tree.nodes[id];
  n.feature = static_cast<std::int32_t>(feature);
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return id;
}

} // namespace

json model_to_json(const ForestModel& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["stage"] = stage_name(model.stage);
  j["labels"] = stage_labels(model.stage);
  j["schema"] = model.schema;
  j["params"] = {{"n_trees", model.params.n_trees}, {"mtry", model.params.mtry},
                 {"max_depth", model.params.max_depth}, {"min_leaf", model.params.min_leaf},
                 {"seed", model.params.seed}};
  j["importances"] = model.importances;
  j["oob_error"] = model.oob_error ? json(*model.oob_error) : json(nullptr);
  j["oob_coverage"] = model.oob_coverage;
  auto trees = json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
  j["trees"] = std::move(trees);
  return j;
}

ForestModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version")) corrupt("missing 'format_version'");
  if (!j["format_version"].is_number_integer()) corrupt("bad value for 'format_version'");
  const auto version = j["format_version"].get<std::int64_t>();
  if (version != kModelFormatVersion)
    fail(errc::version,
         fmt::format("model format version {} is not supported (this build reads version {})", version, kModelFormatVersion));

  ForestModel m;
  const auto stage = get<std::string>(j, "stage");
  if (stage != "hosting" && stage != "dedicated") fail(errc::schema, fmt::format("unknown model stage '{}'", stage));
  m.stage = parse_stage(stage);
  const auto labels = get<std::vector<std::string>>(j, "labels");
  const auto& expected_labels = stage_labels(m.stage);
  if (labels.size() != 2 || labels[0] != expected_labels[0] || labels[1] != expected_labels[1])
    fail(errc::schema, fmt::format("labels do not match the {} stage", stage));
  m.schema = get<std::vector<std::string>>(j, "schema");
  if (m.schema != feature_schema(m.stage))
    fail(errc::schema, fmt::format("feature schema does not match the {} stage", stage));

  const auto& p = j.contains("params") ? j["params"] : json();
  m.params.n_trees = get<std::uint32_t>(p, "n_trees");
  m.params.mtry = get<std::uint32_t>(p, "mtry");
  m.params.max_depth = get<std::uint32_t>(p, "max_depth");
  m.params.min_leaf = get<std::uint32_t>(p, "min_leaf");
  m.params.seed = get<std::uint64_t>(p, "seed");

  m.importances = get<std::vector<double>>(j, "importances");
  if (m.importances.size() != m.schema.size()) corrupt("importances length");
  if (!j.contains("oob_error")) corrupt("missing 'oob_error'");
  if (!j["oob_error"].is_null()) m.oob_error = get<double>(j, "oob_error");
  m.oob_coverage = get<double>(j, "oob_coverage");

  if (!j.contains("trees") || !j["trees"].is_array()) corrupt("missing 'trees'");
  for (const auto& t : j["trees"]) {
    Tree tree;
    node_from_json(t, m.schema.size(), tree, 0);
    m.trees.push_back(std::move(tree));
  }
  if (m.trees.empty() || m.trees.size() != m.params.n_trees) corrupt("tree count does not match n_trees");
  return m;
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(errc::io, fmt::format("cannot write model '{}'", path.string()));
    out << model_to_json(model).dump() << '\n';
    if (!out) fail(errc::io, fmt::format("write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(errc::io, fmt::format("cannot move model into '{}': {}", path.string(), ec.message()));
}

ForestModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, fmt::format("cannot read model '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail(errc::corrupt, fmt::format("corrupt model '{}': {}", path.string(), e.what()));
  }
  return model_from_json(j);
}

json model_report_json(const ForestModel& model) {
  json j;
  j["stage"] = stage_name(model.stage);
  j["params"] = {{"n_trees", model.params.n_trees}, {"mtry", model.params.mtry},
                 {"max_depth", model.params.max_depth}, {"min_leaf", model.params.min_leaf},
                 {"seed", model.params.seed}};
  j["oob_error"] = model.oob_error ? json(*model.oob_error) : json(nullptr);
  j["oob_coverage"] = model.oob_coverage;
  std::vector<std::size_t> order(model.schema.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.importances[a] > model.importances[b]; });
  auto imp = json::array();
  for (auto i : order) imp.push_back({{"feature", model.schema[i]}, {"importance", model.importances[i]}});
  j["importances"] = std::move(imp);
  std::size_t nodes = 0, max_depth = 0;
  for (const auto& t : model.trees) {
    nodes += t.nodes.size();
    max_depth = std::max(max_depth, t.depth());
  }
  j["total_nodes"] = nodes;
  j["max_tree_depth"] = max_depth;
  return j;
}

} // namespace hostscope
