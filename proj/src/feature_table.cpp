#include "feature_table.hpp"

#include "features_dedicated.hpp"
#include "features_hosting.hpp"
#include "util.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

namespace hostscope {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::uint64_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    fail(errc::parse, fmt::format("line {}: bad number '{}'", line, text));
  return v;
}

} // namespace

const std::vector<std::string>& feature_schema(Stage stage) {
  return stage == Stage::Hosting ? HostingFeatures::schema() : DedicatedFeatures::schema();
}

std::vector<double> feature_row(const PdnsStore& pdns, const WhoisStore& whois, IpV4 ip, std::int64_t reference,
                                Stage stage) {
  if (stage == Stage::Hosting) return extract_hosting_features(pdns, whois, ip, reference).to_row();
  return extract_dedicated_features(pdns, whois, ip, reference).to_row();
}

bool FeatureTable::has_labels() const {
  for (const auto& l : labels)
    if (l) return true;
  return false;
}

Dataset FeatureTable::to_dataset() const {
  Dataset d{stage, feature_schema(stage), {}, {}, {}};
  for (std::size_t i = 0; i < ips.size(); ++i)
    if (labels[i]) d.add_row(row(i), *labels[i], ips[i].to_string());
  return d;
}

FeatureTable build_feature_table(const PdnsStore& pdns, const WhoisStore& whois, std::span<const IpV4> ips,
                                 std::int64_t reference, Stage stage, unsigned jobs) {
  FeatureTable t;
  t.stage = stage;
  t.ips.assign(ips.begin(), ips.end());
  t.labels.assign(ips.size(), std::nullopt);
  const std::size_t w = t.width();
  t.values.assign(ips.size() * w, 0.0);
  parallel_for(ips.size(), jobs, [&](std::size_t i) {
    const auto row = feature_row(pdns, whois, ips[i], reference, stage);
    std::copy(row.begin(), row.end(), t.values.begin() + static_cast<std::ptrdiff_t>(i * w));
  });
  return t;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, fmt::format("cannot write '{}'", path.string()));
  const bool labelled = table.has_labels();
  std::string line = "ip";
  for (const auto& name : feature_schema(table.stage)) line += "," + name;
  if (labelled) line += ",label";
  out << line << '\n';
  for (std::size_t i = 0; i < table.ips.size(); ++i) {
    line = table.ips[i].to_string();
    for (double v : table.row(i)) fmt::format_to(std::back_inserter(line), ",{}", v);
    if (labelled) line += "," + (table.labels[i] ? stage_labels(table.stage)[*table.labels[i]] : std::string("NA"));
    out << line << '\n';
  }
  if (!out) fail(errc::io, fmt::format("write to '{}' failed", path.string()));
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, fmt::format("cannot read '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line)) fail(errc::schema, fmt::format("'{}' has no header", path.string()));
  const auto header = split_csv(strip_cr(line));
  FeatureTable t;
  if (header.size() >= 2 && header[1] == feature_schema(Stage::Dedicated).front()) t.stage = Stage::Dedicated;
  const auto& schema = feature_schema(t.stage);
  bool labelled = false;
  if (header.size() == schema.size() + 2 && header.back() == "label")
    labelled = true;
  else if (header.size() != schema.size() + 1)
    fail(errc::schema, fmt::format("'{}': header does not match a feature schema", path.string()));
  if (header[0] != "ip") fail(errc::schema, fmt::format("'{}': first column must be ip", path.string()));
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (header[i + 1] != schema[i])
      fail(errc::schema, fmt::format("'{}': column {} is '{}', expected '{}'", path.string(), i + 2, header[i + 1], schema[i]));

  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split_csv(text);
    if (fields.size() != header.size())
      fail(errc::parse, fmt::format("'{}' line {}: expected {} fields, got {}", path.string(), line_no, header.size(), fields.size()));
    t.ips.push_back(IpV4::parse(fields[0]));
    for (std::size_t i = 0; i < schema.size(); ++i) t.values.push_back(parse_double(fields[i + 1], line_no));
    std::optional<std::uint8_t> label;
    if (labelled && fields.back() != "NA") {
      label = label_index(t.stage, fields.back());
      if (!label)
        fail(errc::parse, fmt::format("'{}' line {}: label '{}' is not a {} label", path.string(), line_no,
                                      fields.back(), stage_name(t.stage)));
    }
    t.labels.push_back(label);
  }
  return t;
}

std::unordered_map<IpV4, std::uint8_t> load_label_map(const std::filesystem::path& path, Stage stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, fmt::format("cannot read labels '{}'", path.string()));
  std::unordered_map<IpV4, std::uint8_t> out;
  std::string line;
  std::uint64_t line_no = 0;
  bool json_lines = false, decided = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    if (!decided) {
      decided = true;
      json_lines = text.front() == '{';
      if (!json_lines) {
        if (stage != Stage::Dedicated)
          fail(errc::stage, "a labels CSV only carries dedicated/shared labels");
        if (text.substr(0, 3) == "ip,") continue;
      }
    }
    const auto where = fmt::format("'{}' line {}", path.string(), line_no);
    if (json_lines) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error&) {
        fail(errc::parse, where + ": not a JSON object");
      }
      if (!j.is_object() || !j.contains("ip") || !j["ip"].is_string()) fail(errc::parse, where + ": missing ip");
      const char* key = stage == Stage::Hosting ? "stage1_truth" : "stage2_truth";
      if (!j.contains(key) || j[key].is_null()) continue;
      if (!j[key].is_string()) fail(errc::parse, where + fmt::format(": '{}' is not a string", key));
      const auto label = label_index(stage, j[key].get<std::string>());
      if (!label) fail(errc::parse, where + fmt::format(": unknown label '{}'", j[key].get<std::string>()));
      out[IpV4::parse(j["ip"].get<std::string>())] = *label;
    } else {
      const auto fields = split_csv(text);
      if (fields.size() < 2) fail(errc::parse, where + ": expected ip,label,rule");
      if (fields[1] == "NA") continue;
      const auto label = label_index(stage, fields[1]);
      if (!label) fail(errc::parse, where + fmt::format(": unknown label '{}'", fields[1]));
      out[IpV4::parse(fields[0])] = *label;
    }
  }
  return out;
}

std::vector<IpV4> read_ip_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, fmt::format("cannot read address list '{}'", path.string()));
  std::vector<IpV4> out;
  std::string line;
  while (std::getline(in, line)) {
    auto text = strip_cr(line);
    if (text.empty() || text.front() == '#') continue;
    text = text.substr(0, text.find(','));
    if (text == "ip") continue;
    out.push_back(IpV4::parse(text));
  }
  return out;
}

} // namespace hostscope
