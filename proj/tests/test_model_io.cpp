#include "feature_table.hpp"
#include "model_io.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace hostscope;
using namespace testing_support;

namespace {

ForestModel small_model(Stage stage, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Dataset d;
  d.stage = stage;
  d.schema = feature_schema(stage);
  for (int i = 0; i < 120; ++i) {
    std::vector<double> row(d.width());
    for (auto& v : row) v = g(rng);
    row[0] += (i % 2) * 2.5;
    d.add_row(row, static_cast<std::uint8_t>(i % 2));
  }
  ForestParams p;
  p.n_trees = 25;
  p.seed = seed;
  return train_forest(d, p);
}

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return errc::internal;
}

} // namespace

TEST_CASE("save and load keep every prediction") {
  TempDir dir;
  const auto m = small_model(Stage::Hosting, 3);
  save_model(m, dir / "m.json");
  const auto back = load_model(dir / "m.json");
  CHECK(back.stage == m.stage);
  CHECK(back.schema == m.schema);
  CHECK(back.importances == m.importances);
  CHECK(back.oob_error == m.oob_error);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 2);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> row(m.schema.size());
    for (auto& v : row) v = g(rng);
    CHECK(back.predict_proba(row) == m.predict_proba(row));
    CHECK(back.predict(row) == m.predict(row));
  }
  CHECK(model_to_json(back).dump() == model_to_json(m).dump());
}

TEST_CASE("damaged model files") {
  TempDir dir;
  const auto m = small_model(Stage::Dedicated, 5);
  save_model(m, dir / "m.json");
  const auto text = read_file(dir / "m.json");

  write_file(dir / "cut.json", text.substr(0, text.size() / 2));
  CHECK(code_of([&] { load_model(dir / "cut.json"); }) == errc::corrupt);

  auto j = model_to_json(m);
  j["format_version"] = 7;
  write_file(dir / "v.json", j.dump());
  try {
    load_model(dir / "v.json");
    FAIL("expected a version error");
  } catch (const error& e) {
    CHECK(e.code() == errc::version);
    CHECK(std::string(e.what()).find('7') != std::string::npos);
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }

  j = model_to_json(m);
  j["schema"][0] = "renamed";
  write_file(dir / "s.json", j.dump());
  CHECK(code_of([&] { load_model(dir / "s.json"); }) == errc::schema);

  j = model_to_json(m);
  j["trees"][0] = {{"f", 0}};
  write_file(dir / "t.json", j.dump());
  CHECK(code_of([&] { load_model(dir / "t.json"); }) == errc::corrupt);

  CHECK(code_of([&] { load_model(dir / "missing.json"); }) == errc::io);
}

TEST_CASE("same seed gives identical model bytes") {
  TempDir dir;
  save_model(small_model(Stage::Hosting, 9), dir / "a.json");
  save_model(small_model(Stage::Hosting, 9), dir / "b.json");
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));
  save_model(small_model(Stage::Hosting, 10), dir / "c.json");
  CHECK(read_file(dir / "a.json") != read_file(dir / "c.json"));
}

TEST_CASE("training report ranks importances") {
  const auto r = model_report_json(small_model(Stage::Hosting, 2));
  REQUIRE(r["importances"].is_array());
  const auto& imp = r["importances"];
  for (std::size_t i = 1; i < imp.size(); ++i)
    CHECK(imp[i - 1]["importance"].get<double>() >= imp[i]["importance"].get<double>());
  CHECK(r["total_nodes"].get<int>() > 0);
}
