#pragma once

#include "datamodel.hpp"
#include "error.hpp"

#include <span>
#include <string>
#include <vector>

namespace hostscope {

/// Labelled feature matrix for one stage. Rows are stored row-major; labels
/// index into stage_labels(stage).
struct Dataset {
  Stage stage = Stage::Hosting;
  std::vector<std::string> schema;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> ids;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return schema.size(); }
  std::span<const double> row(std::size_t i) const { return std::span(values).subspan(i * width(), width()); }
  double at(std::size_t i, std::size_t feature) const { return values[i * width() + feature]; }

  void add_row(std::span<const double> row, std::uint8_t label, std::string id = {}) {
    if (row.size() != width()) fail(errc::schema, "row width does not match schema");
    if (label > 1) fail(errc::data, "label outside the stage label space");
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(label);
    ids.push_back(std::move(id));
  }

  std::size_t count(std::uint8_t label) const {
    std::size_t n = 0;
    for (auto l : labels) n += (l == label);
    return n;
  }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset out{stage, schema, {}, {}, {}};
    out.values.reserve(rows.size() * width());
    for (auto r : rows) out.add_row(row(r), labels[r], ids[r]);
    return out;
  }
};

} // namespace hostscope
