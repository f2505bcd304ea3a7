#pragma once

#include "dataset.hpp"
#include "ingest.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace hostscope {

/// Model columns of a stage, in CSV and model order.
const std::vector<std::string>& feature_schema(Stage stage);

/// One model row for `ip` (one-hot f14 already expanded for stage 1).
std::vector<double> feature_row(const PdnsStore& pdns, const WhoisStore& whois, IpV4 ip, std::int64_t reference,
                                Stage stage);

/// Feature matrix keyed by address, labels optional per row.
struct FeatureTable {
  Stage stage = Stage::Hosting;
  std::vector<IpV4> ips;
  std::vector<double> values;
  std::vector<std::optional<std::uint8_t>> labels;

  std::size_t width() const { return feature_schema(stage).size(); }
  std::span<const double> row(std::size_t i) const { return std::span(values).subspan(i * width(), width()); }
  bool has_labels() const;
  /// Labelled rows only, ids set to the dotted-quad address.
  Dataset to_dataset() const;
};

/// Extracts rows for `ips` (kept in the given order) on up to `jobs` threads.
FeatureTable build_feature_table(const PdnsStore& pdns, const WhoisStore& whois, std::span<const IpV4> ips,
                                 std::int64_t reference, Stage stage, unsigned jobs = 1);

/// CSV: `ip,<schema...>[,label]`, reals in shortest round-trip form.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);
/// Reads a CSV written by write_feature_csv. The stage is inferred from the
/// header; a header that matches neither schema is an errc::schema error.
FeatureTable read_feature_csv(const std::filesystem::path& path);

/// Labels per address for `stage`, read either from a generator truth file
/// (JSON lines) or from a labeler CSV (`ip,label,rule`). Rows without a label
/// for the stage are omitted.
std::unordered_map<IpV4, std::uint8_t> load_label_map(const std::filesystem::path& path, Stage stage);

/// Addresses listed one per line (first comma-separated field); blank lines,
/// '#' comments and an `ip` header are skipped.
std::vector<IpV4> read_ip_list(const std::filesystem::path& path);

} // namespace hostscope
