#pragma once

#include "ingest.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing_support {

namespace fs = std::filesystem;
using namespace hostscope;

class TempDir {
public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("hostscope_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

private:
  fs::path path_;
};

inline fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

inline PdnsStore make_store(const std::vector<PdnsRecord>& records, const SuffixList& suffixes) {
  PdnsStore::Builder b(suffixes);
  for (const auto& r : records) b.add(r);
  return std::move(b).build();
}

inline PdnsRecord rec(std::string name, IpV4 ip, std::int64_t first = 1600000000, std::int64_t last = 1600000000,
                      std::uint64_t count = 1) {
  return PdnsRecord{std::move(name), "A", ip, first, last, count};
}

inline const std::vector<std::string>& test_suffixes() {
  static const std::vector<std::string> v{"com", "net", "org", "uk", "co.uk", "io"};
  return v;
}

/// Small randomized corpus: a few dense /24 blocks, names drawn from a
/// shared pool (so apexes repeat across addresses), nested and queried WHOIS
/// snapshots with some outside the horizon.
struct RandomCorpus {
  std::vector<PdnsRecord> pdns;
  std::vector<WhoisSnapshot> whois;
  std::vector<IpV4> ips;  // every address with a record or a snapshot
  std::int64_t reference = 1610712000;
};

inline RandomCorpus random_corpus(std::uint64_t seed, std::size_t max_records = 10000, std::size_t max_whois = 1000) {
  std::mt19937_64 rng(seed);
  auto uni = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  RandomCorpus c;
  const std::int64_t day = 86400;
  const std::int64_t year = static_cast<std::int64_t>(365.25 * day);

  std::vector<std::string> pool;
  const auto& sfx = test_suffixes();
  const int n_apex = static_cast<int>(uni(5, 400));
  for (int a = 0; a < n_apex; ++a) {
    const std::string apex = "d" + std::to_string(a) + "." + sfx[static_cast<std::size_t>(uni(0, 5))];
    pool.push_back(apex);
    for (int k = static_cast<int>(uni(0, 3)); k > 0; --k) pool.push_back("w" + std::to_string(k) + "." + apex);
    if (uni(0, 9) == 0) pool.push_back("x.y." + apex);
  }
  pool.push_back("co.uk");  // bare suffix: no apex
  pool.push_back("com");

  const int n_blocks = static_cast<int>(uni(1, 4));
  std::vector<std::uint32_t> blocks;
  for (int b = 0; b < n_blocks; ++b) blocks.push_back(static_cast<std::uint32_t>(uni(1, 200)) << 24 | (b << 8));
  std::vector<IpV4> addrs;
  for (auto base : blocks)
    for (int k = static_cast<int>(uni(1, 40)); k > 0; --k) addrs.push_back(IpV4(base | static_cast<std::uint32_t>(uni(0, 255))));

  const std::size_t n_records = static_cast<std::size_t>(uni(1, static_cast<std::int64_t>(max_records)));
  for (std::size_t i = 0; i < n_records; ++i) {
    const IpV4 ip = addrs[static_cast<std::size_t>(uni(0, static_cast<std::int64_t>(addrs.size()) - 1))];
    const auto& name = pool[static_cast<std::size_t>(uni(0, static_cast<std::int64_t>(pool.size()) - 1))];
    // half the records touch the 60-day churn window
    const std::int64_t first = uni(0, 1) ? c.reference - uni(0, 70 * day) : c.reference - uni(0, 6 * year);
    const std::int64_t last = std::min(c.reference + day, first + uni(0, 1) * uni(0, 2 * year));
    c.pdns.push_back(PdnsRecord{name, "A", ip, first, last, static_cast<std::uint64_t>(uni(1, 50))});
  }

  const std::size_t n_whois = static_cast<std::size_t>(uni(0, static_cast<std::int64_t>(max_whois)));
  const std::vector<std::string> owners{"alpha hosting", "beta net", "gamma", "delta llc", "epsilon"};
  for (std::size_t i = 0; i < n_whois; ++i) {
    const IpV4 ip = addrs[static_cast<std::size_t>(uni(0, static_cast<std::int64_t>(addrs.size()) - 1))];
    const int len = static_cast<int>(uni(16, 32));
    const std::uint32_t mask = len == 32 ? ~0u : ~((1u << (32 - len)) - 1);
    WhoisSnapshot s;
    s.range_start = IpV4(ip.value() & mask);
    s.range_end = IpV4((ip.value() & mask) | ~mask);
    s.owner = owners[static_cast<std::size_t>(uni(0, 4))];
    s.net_type = NetType(static_cast<int>(uni(0, kNetTypeCount - 1)));
    s.observed = c.reference - uni(0, 12 * year) + (uni(0, 20) == 0 ? 5 * day : 0);
    // a few shared observation times so records group several snapshots
    if (uni(0, 3) == 0) s.observed = c.reference - (s.observed % 5) * year;
    s.updated = s.observed - uni(0, 8 * year);
    if (uni(0, 1)) s.queried_ip = ip;
    c.whois.push_back(s);
  }

  std::set<IpV4> all(addrs.begin(), addrs.end());
  c.ips.assign(all.begin(), all.end());
  return c;
}

} // namespace testing_support
