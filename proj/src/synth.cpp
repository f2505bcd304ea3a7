#include "synth.hpp"

#include "error.hpp"
#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

namespace hostscope {

using nlohmann::json;

Profiles default_profiles() {
  Profiles p;
  auto& nh = p.nonhosting;
  nh.tld2_mean = 1.06;
  nh.tld3_mean = 0.56;
  nh.fqdn_mean = 2.07;
  nh.count_shape = 1.0;
  nh.min_apexes = 0;
  nh.owners_mean = 1.2;
  nh.whois_mean = 1.26;
  nh.inetnum_size_mean = 15893510.4;
  nh.update_years_mean = 7.0;
  nh.update_shape = 16.0;
  nh.churn_mean = 0.02;
  nh.churn_std = 0.2;
  nh.duration_mean_years = 3.0;
  nh.duration_std_years = 2.0;
  nh.net_type_weights = {0.15, 0.35, 0.15, 0.30, 0.05};

  auto& h = p.hosting;
  h.tld2_mean = 452.6;
  h.tld3_mean = 40.3;
  h.fqdn_mean = 691.45;
  h.count_shape = 0.3;
  h.min_apexes = 1;
  h.owners_mean = 6.8;
  h.whois_mean = 3.67;
  h.inetnum_size_mean = 8652824.7;
  h.update_years_mean = 2.0;
  h.update_shape = 8.0;
  h.churn_mean = 0.65;
  h.churn_std = 3.3;
  h.duration_mean_years = 1.75;
  h.duration_std_years = 1.25;
  h.net_type_weights = {0.55, 0.15, 0.15, 0.10, 0.05};
  h.shared_fraction = 0.5;

  p.dedicated = h;
  p.dedicated.tld2_mean = 796.08;
  p.dedicated.tld3_mean = 43.25;
  p.dedicated.fqdn_mean = 539.828;
  p.dedicated.count_shape = 1.0;
  p.dedicated.min_apexes = 1;
  p.dedicated.churn_mean = 0.12;
  p.dedicated.churn_std = 0.68;
  p.dedicated.duration_mean_years = 2.3;
  p.dedicated.duration_std_years = 1.4;
  p.dedicated.shared_fraction = 0;

  p.shared = p.dedicated;
  p.shared.tld2_mean = 2624.18;
  p.shared.tld3_mean = 609.88;
  p.shared.fqdn_mean = 1650.06;
  p.shared.min_apexes = 2;
  p.shared.churn_mean = 1.18;
  p.shared.churn_std = 5.91;
  p.shared.duration_mean_years = 1.2;
  p.shared.duration_std_years = 1.1;
  return p;
}

void validate_profile(const ClassProfile& p, std::string_view name) {
  auto bad = [&](std::string_view what) { fail(errc::config, fmt::format("profile '{}': {}", name, what)); };
  for (double v : {p.tld2_mean, p.tld3_mean, p.fqdn_mean, p.owners_mean, p.whois_mean, p.inetnum_size_mean,
                   p.update_years_mean, p.churn_mean, p.churn_std, p.duration_mean_years, p.duration_std_years})
    if (!(v >= 0) || !std::isfinite(v)) bad("means and deviations must be finite and non-negative");
  if (!(p.count_shape > 0)) bad("count_shape must be positive");
  if (!(p.update_shape > 0)) bad("update_shape must be positive");
  if (p.owners_mean < 1 || p.whois_mean < 1) bad("owners_mean and whois_mean must be at least 1");
  if (p.inetnum_size_mean < 1) bad("inetnum_size_mean must be at least 1");
  if (p.min_apexes > p.tld2_mean + 1e-9 && p.tld2_mean > 0) bad("min_apexes exceeds tld2_mean");
  if (p.shared_fraction < 0 || p.shared_fraction > 1) bad("shared_fraction must lie in [0, 1]");
  double sum = 0;
  for (double w : p.net_type_weights) {
    if (w < 0) bad("net-type weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) bad("net-type weights must sum to 1");
}

namespace {

const char* kNetTypeKeys[] = {"direct_allocation", "direct_assignment", "reallocated", "reassigned", "unknown"};

json profile_json(const ClassProfile& p) {
  json w;
  for (int i = 0; i < kNetTypeCount; ++i) w[kNetTypeKeys[i]] = p.net_type_weights[i];
  return {{"tld2_mean", p.tld2_mean},
          {"tld3_mean", p.tld3_mean},
          {"fqdn_mean", p.fqdn_mean},
          {"count_shape", p.count_shape},
          {"min_apexes", p.min_apexes},
          {"owners_mean", p.owners_mean},
          {"whois_mean", p.whois_mean},
          {"inetnum_size_mean", p.inetnum_size_mean},
          {"update_years_mean", p.update_years_mean},
          {"update_shape", p.update_shape},
          {"churn_mean", p.churn_mean},
          {"churn_std", p.churn_std},
          {"duration_mean_years", p.duration_mean_years},
          {"duration_std_years", p.duration_std_years},
          {"net_type_weights", w},
          {"shared_fraction", p.shared_fraction}};
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(errc::config, fmt::format("profile key '{}' has the wrong type", key));
  }
}

ClassProfile profile_from(const json& j, ClassProfile p) {
  if (!j.is_object()) fail(errc::config, "profile must be an object");
  static const std::set<std::string> known{"tld2_mean", "tld3_mean", "fqdn_mean", "count_shape", "min_apexes",
                                           "owners_mean", "whois_mean", "inetnum_size_mean", "update_years_mean",
                                           "update_shape", "churn_mean", "churn_std", "duration_mean_years",
                                           "duration_std_years", "net_type_weights", "shared_fraction"};
  for (const auto& [k, v] : j.items())
    if (!known.contains(k)) fail(errc::config, fmt::format("unknown profile key '{}'", k));
  take(j, "tld2_mean", p.tld2_mean);
  take(j, "tld3_mean", p.tld3_mean);
  take(j, "fqdn_mean", p.fqdn_mean);
  take(j, "count_shape", p.count_shape);
  take(j, "min_apexes", p.min_apexes);
  take(j, "owners_mean", p.owners_mean);
  take(j, "whois_mean", p.whois_mean);
  take(j, "inetnum_size_mean", p.inetnum_size_mean);
  take(j, "update_years_mean", p.update_years_mean);
  take(j, "update_shape", p.update_shape);
  take(j, "churn_mean", p.churn_mean);
  take(j, "churn_std", p.churn_std);
  take(j, "duration_mean_years", p.duration_mean_years);
  take(j, "duration_std_years", p.duration_std_years);
  take(j, "shared_fraction", p.shared_fraction);
  if (j.contains("net_type_weights")) {
    const auto& w = j["net_type_weights"];
    if (!w.is_object()) fail(errc::config, "net_type_weights must be an object");
    for (int i = 0; i < kNetTypeCount; ++i) take(w, kNetTypeKeys[i], p.net_type_weights[i]);
  }
  return p;
}

} // namespace

json profiles_to_json(const Profiles& p) {
  return {{"nonhosting", profile_json(p.nonhosting)},
          {"hosting", profile_json(p.hosting)},
          {"dedicated", profile_json(p.dedicated)},
          {"shared", profile_json(p.shared)}};
}

Profiles profiles_from_json(const json& j, Profiles base) {
  if (!j.is_object()) fail(errc::config, "profiles must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "nonhosting") base.nonhosting = profile_from(v, base.nonhosting);
    else if (k == "hosting") base.hosting = profile_from(v, base.hosting);
    else if (k == "dedicated") base.dedicated = profile_from(v, base.dedicated);
    else if (k == "shared") base.shared = profile_from(v, base.shared);
    else fail(errc::config, fmt::format("unknown profile '{}'", k));
  }
  return base;
}

json config_json(const GenerateConfig& c) {
  return {{"seed", c.seed},
          {"n_nonhosting", c.n_nonhosting},
          {"n_hosting", c.n_hosting},
          {"n_dedicated", c.n_dedicated},
          {"n_shared", c.n_shared},
          {"reference", c.reference},
          {"window_days", c.window_days},
          {"horizon_years", c.horizon_years},
          {"privacy_fraction", c.privacy_fraction},
          {"redirect_fraction", c.redirect_fraction},
          {"malicious", c.malicious},
          {"noise_capture_fraction", c.noise_capture_fraction},
          {"split_record_fraction", c.split_record_fraction},
          {"profiles", profiles_to_json(c.profiles)}};
}

std::vector<std::string> synth_suffix_entries() { return {"com", "net", "org", "uk", "co.uk", "au", "com.au"}; }

SuffixList synth_suffixes() { return SuffixList(synth_suffix_entries()); }

std::string format_truth_line(const TruthRow& t) {
  json j = {{"ip", t.ip.to_string()},
            {"stage1_truth", stage_labels(Stage::Hosting)[static_cast<int>(t.stage1)]},
            {"stage2_truth", t.stage2 ? json(stage_labels(Stage::Dedicated)[static_cast<int>(*t.stage2)]) : json(nullptr)},
            {"owners", t.owners},
            {"malicious", t.malicious}};
  return j.dump();
}

std::string format_domain_whois_line(const DomainWhois& w) {
  return json{{"domain", w.domain},
              {"registrant", w.registrant ? json(*w.registrant) : json(nullptr)},
              {"privacy_protected", w.privacy_protected}}
      .dump();
}

std::string format_redirect_line(const RedirectEdge& e) { return json{{"from", e.from}, {"to", e.to}}.dump(); }

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::uint64_t poisson(Rng& rng, double mean) {
  if (mean <= 0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

double gamma_draw(Rng& rng, double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

/// Gamma-Poisson mixture with the given mean and shape.
std::uint64_t neg_binomial(Rng& rng, double mean, double shape) {
  if (mean <= 0) return 0;
  return poisson(rng, gamma_draw(rng, shape, mean / shape));
}

/// Gamma with mean and standard deviation; the deviation 0 case is constant.
double gamma_ms(Rng& rng, double mean, double sd) {
  if (mean <= 0) return 0;
  if (sd <= 0) return mean;
  const double shape = (mean / sd) * (mean / sd);
  return gamma_draw(rng, shape, sd * sd / mean);
}

template <class Weights>
std::size_t weighted_pick(Rng& rng, const Weights& w) {
  double total = 0;
  for (double v : w) total += v;
  double u = uniform(rng) * total;
  std::size_t i = 0;
  for (double v : w) {
    if (u < v) return i;
    u -= v;
    ++i;
  }
  return std::size(w) - 1;
}

// Negative-binomial CDF table, truncated once the tail mass is negligible.
std::vector<double> nb_cdf(double mean, double shape) {
  std::vector<double> cdf;
  if (mean <= 0) return {1.0};
  const double p = shape / (shape + mean);
  double pmf = std::pow(p, shape), acc = 0;
  for (std::uint64_t x = 0; x < 5'000'000; ++x) {
    acc += pmf;
    cdf.push_back(std::min(acc, 1.0));
    if (1.0 - acc < 1e-13 && x > mean) break;
    pmf *= (static_cast<double>(x) + shape) / (static_cast<double>(x) + 1.0) * (1.0 - p);
  }
  return cdf;
}

double cdf_at(const std::vector<double>& cdf, std::int64_t x) {
  if (x < 0) return 0;
  return static_cast<std::size_t>(x) < cdf.size() ? cdf[x] : 1.0;
}

// Name-count model: apexes A = min + NB, tld3 names T (zero when A is zero),
// deeper names D under existing tld3s. Total names F = max(A, T) + D.
struct NameModel {
  double p_any = 1;     // P(A >= 1)
  double t_mean = 0;    // mean of T given A >= 1
  double d_mean = 0;    // mean of D given T >= 1
};

NameModel name_model(const ClassProfile& p) {
  NameModel m;
  const double a_extra = std::max(0.0, p.tld2_mean - p.min_apexes);
  const auto a_cdf = nb_cdf(a_extra, p.count_shape);
  m.p_any = p.min_apexes >= 1 ? 1.0 : 1.0 - cdf_at(a_cdf, 0);
  if (m.p_any <= 0) return m;
  m.t_mean = p.tld3_mean / m.p_any;
  const auto t_cdf = nb_cdf(m.t_mean, p.count_shape);
  const double a0 = cdf_at(a_cdf, -static_cast<std::int64_t>(p.min_apexes));
  // E[max(A, T) | A >= 1] = sum over x of P(max > x)
  double e_max = 0;
  for (std::int64_t x = 0;; ++x) {
    double fa = cdf_at(a_cdf, x - static_cast<std::int64_t>(p.min_apexes));
    if (p.min_apexes == 0) fa = (fa - a0) / (1.0 - a0);
    const double tail = 1.0 - std::max(0.0, fa) * cdf_at(t_cdf, x);
    e_max += tail;
    if (tail < 1e-12 && x > static_cast<std::int64_t>(std::max(a_cdf.size(), t_cdf.size()))) break;
    if (x > 20'000'000) break;
  }
  const double p_t = 1.0 - cdf_at(t_cdf, 0);
  if (p_t > 0) m.d_mean = std::max(0.0, (p.fqdn_mean / m.p_any - e_max) / p_t);
  return m;
}

// --- names ---------------------------------------------------------------

const char* kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "ta", "vo", "zi", "be", "da", "fu", "go", "hi", "jo", "pa",
                            "se", "ti", "wu", "xa", "ye"};
const char* kTld3Labels[] = {"www", "mail", "shop", "blog", "api", "cdn", "dev", "m", "app", "static", "img", "news",
                             "portal", "login", "docs"};
const char* kSuffixes[] = {"com", "net", "org", "co.uk", "com.au"};
const double kSuffixWeights[] = {0.6, 0.15, 0.1, 0.1, 0.05};

std::string base36(std::uint64_t v) {
  std::string s;
  do {
    s.push_back("0123456789abcdefghijklmnopqrstuvwxyz"[v % 36]);
    v /= 36;
  } while (v);
  std::reverse(s.begin(), s.end());
  return s;
}

std::string make_apex(Rng& rng, std::uint64_t serial) {
  std::string label;
  const int n = static_cast<int>(uniform_int(rng, 2, 4));
  for (int i = 0; i < n; ++i) label += kSyllables[uniform_int(rng, 0, std::size(kSyllables) - 1)];
  label += base36(serial);
  return label + "." + kSuffixes[weighted_pick(rng, kSuffixWeights)];
}

const char* kOrgFirst[] = {"Blue", "North", "Silver", "Granite", "Harbor", "Summit", "Cedar", "Iron", "Bright",
                           "River", "Quartz", "Falcon", "Maple", "Aurora", "Pioneer", "Delta"};
const char* kOrgSecond[] = {"Ridge", "Point", "Works", "Systems", "Labs", "Trading", "Media", "Digital", "Partners",
                            "Holdings", "Solutions", "Ventures"};
const char* kOrgSuffix[] = {"Inc", "LLC", "Ltd", "GmbH", "SA", "Corp"};

std::string make_org(Rng& rng, std::uint64_t serial) {
  return fmt::format("{} {} {} {}", kOrgFirst[uniform_int(rng, 0, std::size(kOrgFirst) - 1)],
                     kOrgSecond[uniform_int(rng, 0, std::size(kOrgSecond) - 1)], base36(serial),
                     kOrgSuffix[uniform_int(rng, 0, std::size(kOrgSuffix) - 1)]);
}

// Formatting variants that all normalize to the same owner string.
std::string owner_variant(Rng& rng, const std::string& owner) {
  switch (uniform_int(rng, 0, 4)) {
    case 1: {
      std::string s = owner;
      for (auto& c : s)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      return s;
    }
    case 2: {
      std::string s = owner;
      for (auto& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      return s;
    }
    case 3: {
      const auto last = owner.rfind(' ');
      return owner.substr(0, last) + ", " + owner.substr(last + 1) + ".";
    }
    case 4: return "  " + owner + " ";
    default: return owner;
  }
}

const char* kProviders[] = {"Cloudvault Hosting", "Nimbus Servers", "Harborline Networks", "Stackyard Compute",
                            "Bytefield Hosting", "Orbitel Web Services", "Quayside Data", "Lumen Edge Hosting",
                            "Pinecrest Colo", "Tidewater Cloud"};
const char* kIsps[] = {"Metro Broadband", "Valley Telecom", "Northern Cable", "Coastal DSL", "Prairie Wireless",
                       "Citynet Residential"};

// --- per-address planning -------------------------------------------------

enum class Cls : std::uint8_t { NonHosting, Hosting, Dedicated, Shared };

struct Interval {
  std::int64_t first = 0;
  std::int64_t last = 0;
};

struct AddressPlan {
  IpV4 ip;
  Cls cls = Cls::NonHosting;
  std::uint64_t index = 0;
};

struct Generator {
  const GenerateConfig& cfg;
  CorpusSink& sink;
  std::array<NameModel, 4> models;
  std::uint64_t apex_serial = 0;
  std::uint64_t org_serial = 0;
  std::int64_t ref_day;
  std::int64_t window_start;

  // malicious bookkeeping
  std::vector<std::pair<std::string, std::size_t>> malicious_home;  // apex, truth index
  std::vector<std::string> benign_hosting_apexes;
  std::vector<TruthRow> truth;

  Generator(const GenerateConfig& c, CorpusSink& s)
      : cfg(c), sink(s), ref_day(day_of(c.reference)), window_start(day_of(c.reference) - (c.window_days - 1)) {}

  const ClassProfile& profile(Cls c) const {
    switch (c) {
      case Cls::NonHosting: return cfg.profiles.nonhosting;
      case Cls::Hosting: return cfg.profiles.hosting;
      case Cls::Dedicated: return cfg.profiles.dedicated;
      case Cls::Shared: break;
    }
    return cfg.profiles.shared;
  }

  std::int64_t ts_in_day(Rng& rng, std::int64_t day, bool late) const {
    return day * kSecondsPerDay + (late ? uniform_int(rng, 43200, 86399) : uniform_int(rng, 0, 43199));
  }

  // Apex intervals on one address: churn events inside the window, the rest
  // either active through the window or ended before it.
  std::vector<Interval> apex_intervals(Rng& rng, std::size_t n_apexes, const ClassProfile& temporal) const {
    struct Event {
      std::int64_t day;
      bool arrival;
    };
    std::vector<Event> events;
    const double m = temporal.churn_mean, s = temporal.churn_std;
    if (m > 0) {
      const double p = s > 0 ? std::min(1.0, (m / s) * (m / s)) : 1.0;
      const double burst = m / p;
      for (std::int64_t t = window_start + 1; t <= ref_day; ++t) {
        if (uniform(rng) >= p) continue;
        const double whole = std::floor(burst);
        const auto b = static_cast<std::uint64_t>(whole) + (uniform(rng) < burst - whole ? 1 : 0);
        for (std::uint64_t e = 0; e < b; ++e) events.push_back({t, uniform(rng) < 0.5});
      }
    }
    if (events.size() > n_apexes) events.resize(n_apexes);

    const double mean_days = temporal.duration_mean_years * 365.25;
    const double sd_days = temporal.duration_std_years * 365.25;
    auto duration = [&] { return std::max<std::int64_t>(1, std::llround(gamma_ms(rng, mean_days, sd_days))); };

    std::vector<Interval> out;
    out.reserve(n_apexes);
    for (const auto& e : events) {
      if (e.arrival) {
        out.push_back({e.day, ref_day});
      } else {
        const std::int64_t last = e.day - 1;
        out.push_back({std::min(last - duration(), window_start - 1), last});
      }
    }
    while (out.size() < n_apexes) {
      if (uniform(rng) < 0.3) {
        out.push_back({std::min(ref_day - duration(), window_start - 1), ref_day});
      } else {
        const std::int64_t last = window_start - 1 - uniform_int(rng, 1, 3 * 365);
        out.push_back({last - duration(), last});
      }
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
  }

  void emit_name(Rng& rng, IpV4 ip, const std::string& name, const Interval& iv) {
    const std::int64_t first = ts_in_day(rng, iv.first, false);
    const std::int64_t last = ts_in_day(rng, iv.last, true);
    const std::uint64_t count = 1 + poisson(rng, 12.0);
    if (uniform(rng) < cfg.split_record_fraction && count >= 2) {
      const std::int64_t mid = first + (last - first) / 2;
      sink.pdns({name, "A", ip, first, mid, count / 2});
      sink.pdns({name, "A", ip, mid, last, count - count / 2});
    } else {
      sink.pdns({name, "A", ip, first, last, count});
    }
  }

  void emit_whois(Rng& rng, IpV4 ip, const ClassProfile& w) {
    const double year = kSecondsPerYear;
    const std::int64_t horizon_start = cfg.reference - static_cast<std::int64_t>(cfg.horizon_years * year);
    const std::int64_t earliest = horizon_start + kSecondsPerDay;

    const std::size_t wanted_records = 1 + poisson(rng, w.whois_mean - 1.0);
    std::size_t n_owners = 1 + poisson(rng, w.owners_mean - 1.0);
    const double years_since = gamma_draw(rng, w.update_shape, w.update_years_mean / w.update_shape);
    const std::int64_t latest_update = cfg.reference - static_cast<std::int64_t>(years_since * year);

    std::vector<std::int64_t> observed;
    const std::int64_t last_obs = uniform_int(rng, std::max(earliest, latest_update), cfg.reference);
    std::set<std::int64_t> seen{last_obs};
    for (int attempt = 0; seen.size() < wanted_records && attempt < 1000; ++attempt)
      seen.insert(uniform_int(rng, earliest, std::max(earliest, last_obs - 1)));
    observed.assign(seen.begin(), seen.end());
    const std::size_t n_records = observed.size();

    // nested inetnum chains; deepen until every owner has a slot
    constexpr std::size_t kMaxDepth = 8;
    std::vector<std::size_t> depth(n_records);
    const double extra = std::max(0.0, static_cast<double>(n_owners) / static_cast<double>(n_records) - 1.0);
    for (auto& d : depth) d = std::min<std::size_t>(kMaxDepth, 1 + poisson(rng, extra));
    std::size_t slots = std::accumulate(depth.begin(), depth.end(), std::size_t{0});
    for (std::size_t r = 0; slots < n_owners && r < n_records * kMaxDepth; ++r) {
      auto& d = depth[r % n_records];
      if (d < kMaxDepth) {
        ++d;
        ++slots;
      }
    }
    n_owners = std::min(n_owners, slots);

    std::vector<std::string> owners;
    for (std::size_t o = 0; o < n_owners; ++o) owners.push_back(make_org(rng, org_serial++));
    std::vector<std::size_t> owner_of(slots);
    for (std::size_t i = 0; i < slots; ++i)
      owner_of[i] = i < n_owners ? i : static_cast<std::size_t>(uniform_int(rng, 0, n_owners - 1));
    std::shuffle(owner_of.begin(), owner_of.end(), rng);

    const double sigma = 1.0;
    const double mu = std::log(w.inetnum_size_mean) - sigma * sigma / 2.0;
    std::lognormal_distribution<double> size_dist(mu, sigma);
    std::vector<std::uint64_t> sizes;  // innermost first
    std::vector<std::pair<std::uint64_t, std::uint64_t>> chain;
    std::size_t slot = 0;
    for (std::size_t r = 0; r < n_records; ++r) {
      if (sizes.size() != depth[r] || uniform(rng) < 0.4) {
        sizes.clear();
        std::uint64_t s = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(size_dist(rng))), 1,
                                                    std::uint64_t{1} << 30);
        for (std::size_t d = 0; d < depth[r]; ++d) {
          sizes.push_back(s);
          s = std::min<std::uint64_t>(s << uniform_int(rng, 1, 4), std::uint64_t{1} << 32);
        }
        chain.clear();
        std::uint64_t child_start = ip.value(), child_size = 1;
        for (auto sz : sizes) {
          std::uint64_t start = child_start - std::min<std::uint64_t>(child_start, uniform_int(rng, 0, sz - child_size));
          if (start + sz > (std::uint64_t{1} << 32)) start = (std::uint64_t{1} << 32) - sz;
          chain.emplace_back(start, start + sz - 1);
          child_start = start;
          child_size = sz;
        }
      }
      for (std::size_t d = 0; d < depth[r]; ++d) {
        WhoisSnapshot s;
        s.range_start = IpV4(static_cast<std::uint32_t>(chain[d].first));
        s.range_end = IpV4(static_cast<std::uint32_t>(chain[d].second));
        s.owner = owner_variant(rng, owners[owner_of[slot++]]);
        s.net_type = d == 0 ? static_cast<NetType>(weighted_pick(rng, w.net_type_weights)) : NetType::DirectAllocation;
        s.observed = observed[r];
        const bool current = r + 1 == n_records && d == 0;
        s.updated = current ? latest_update
                            : std::min(observed[r], latest_update) - uniform_int(rng, 0, static_cast<std::int64_t>(2 * year));
        s.queried_ip = ip;
        sink.whois(s);
      }
    }

    if (uniform(rng) < cfg.noise_capture_fraction) {
      WhoisSnapshot s;
      s.range_start = IpV4(ip.value() & 0xFFFFFF00u);
      s.range_end = IpV4(ip.value() | 0xFFu);
      s.owner = make_org(rng, org_serial++);
      s.net_type = NetType::Reassigned;
      s.observed = horizon_start - uniform_int(rng, kSecondsPerDay, static_cast<std::int64_t>(3 * year));
      s.updated = s.observed - uniform_int(rng, 0, static_cast<std::int64_t>(year));
      s.queried_ip = ip;
      sink.whois(s);
    }
  }

  void address(const AddressPlan& a) {
    Rng rng(derive_seed(cfg.seed, a.index));
    const ClassProfile& counts = profile(a.cls);
    const NameModel& nm = models[static_cast<int>(a.cls)];

    std::uint64_t n_apex =
        counts.min_apexes + neg_binomial(rng, std::max(0.0, counts.tld2_mean - counts.min_apexes), counts.count_shape);
    if (cfg.malicious && n_apex == 0) n_apex = 1;
    std::uint64_t n_tld3 = n_apex == 0 ? 0 : neg_binomial(rng, nm.t_mean, counts.count_shape);
    std::uint64_t n_deep = n_tld3 == 0 ? 0 : neg_binomial(rng, nm.d_mean, counts.count_shape);

    TruthRow t;
    t.ip = a.ip;
    const ClassProfile* temporal = &counts;
    switch (a.cls) {
      case Cls::NonHosting: t.stage1 = HostingLabel::NonHosting; break;
      case Cls::Hosting: {
        t.stage1 = HostingLabel::Hosting;
        const bool shared = n_apex >= 2 && uniform(rng) < counts.shared_fraction;
        t.stage2 = shared ? SharingLabel::Shared : SharingLabel::Dedicated;
        temporal = shared ? &cfg.profiles.shared : &cfg.profiles.dedicated;
        break;
      }
      case Cls::Dedicated:
        t.stage1 = HostingLabel::Hosting;
        t.stage2 = SharingLabel::Dedicated;
        break;
      case Cls::Shared:
        t.stage1 = HostingLabel::Hosting;
        t.stage2 = n_apex >= 2 ? SharingLabel::Shared : SharingLabel::Dedicated;
        break;
    }

    std::vector<std::string> apexes;
    for (std::uint64_t i = 0; i < n_apex; ++i) apexes.push_back(make_apex(rng, apex_serial++));
    const auto intervals = apex_intervals(rng, apexes.size(), *temporal);

    // tld3 names round-robin over apexes, bare apexes for the uncovered ones,
    // deeper names round-robin over tld3s
    std::vector<std::string> tld3s;
    for (std::uint64_t i = 0; i < n_tld3; ++i) {
      const std::uint64_t apex = i % n_apex, round = i / n_apex;
      const std::string label = round < std::size(kTld3Labels) ? kTld3Labels[round] : fmt::format("s{}", round);
      tld3s.push_back(label + "." + apexes[apex]);
      emit_name(rng, a.ip, tld3s.back(), intervals[apex]);
    }
    for (std::uint64_t j = n_tld3; j < n_apex; ++j) emit_name(rng, a.ip, apexes[j], intervals[j]);
    for (std::uint64_t d = 0; d < n_deep; ++d) {
      const std::uint64_t i = d % n_tld3;
      emit_name(rng, a.ip, fmt::format("n{}.{}", d / n_tld3, tld3s[i]), intervals[i % n_apex]);
    }

    emit_whois(rng, a.ip, a.cls == Cls::NonHosting ? cfg.profiles.nonhosting : cfg.profiles.hosting);

    if (t.stage2 && !apexes.empty()) {
      std::vector<std::string> registrants;
      if (*t.stage2 == SharingLabel::Dedicated) {
        registrants.push_back(make_org(rng, org_serial++));
      } else {
        const auto customers = std::clamp<std::uint64_t>(
            static_cast<std::uint64_t>(std::ceil(static_cast<double>(n_apex) * (0.3 + 0.7 * uniform(rng)))), 2, n_apex);
        for (std::uint64_t c = 0; c < customers; ++c) registrants.push_back(make_org(rng, org_serial++));
      }
      for (std::size_t j = 0; j < apexes.size(); ++j) {
        const std::size_t owner =
            j < registrants.size() ? j : static_cast<std::size_t>(uniform_int(rng, 0, registrants.size() - 1));
        DomainWhois w;
        w.domain = apexes[j];
        if (uniform(rng) < cfg.privacy_fraction) {
          w.privacy_protected = true;
        } else {
          w.registrant = normalize_org(registrants[owner]);
        }
        sink.domain_whois(w);
      }
      for (const auto& r : registrants) t.owners.push_back(normalize_org(r));
      std::sort(t.owners.begin(), t.owners.end());

      if (*t.stage2 == SharingLabel::Dedicated && apexes.size() >= 2 && uniform(rng) < cfg.redirect_fraction)
        for (std::size_t j = 1; j < apexes.size(); ++j) sink.redirect({apexes[j], apexes[0]});
    }

    if (cfg.malicious) {
      const std::size_t n_mal = std::min<std::size_t>(apexes.size(), 1 + poisson(rng, 1.0));
      std::vector<std::size_t> pick(apexes.size());
      std::iota(pick.begin(), pick.end(), 0);
      for (std::size_t i = 0; i < n_mal; ++i) std::swap(pick[i], pick[uniform_int(rng, i, pick.size() - 1)]);
      std::vector<char> is_mal(apexes.size(), 0);
      for (std::size_t i = 0; i < n_mal; ++i) {
        is_mal[pick[i]] = 1;
        t.malicious.push_back(apexes[pick[i]]);
        malicious_home.emplace_back(apexes[pick[i]], truth.size());
      }
      if (t.stage2)
        for (std::size_t j = 0; j < apexes.size(); ++j)
          if (!is_mal[j] && uniform(rng) < 0.01) benign_hosting_apexes.push_back(apexes[j]);
    }
    truth.push_back(std::move(t));
  }

  void cross_plant_and_feed() {
    Rng rng(derive_seed(cfg.seed, "crossplant"));
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (truth[i].stage1 == HostingLabel::NonHosting || truth[i].stage2 == SharingLabel::Shared) targets.push_back(i);
    if (!targets.empty()) {
      for (const auto& [apex, home] : malicious_home) {
        // only apexes with a planted registrant, so labels stay decidable
        if (!truth[home].stage2 || uniform(rng) >= 0.1) continue;
        const auto target = targets[uniform_int(rng, 0, targets.size() - 1)];
        if (target == home) continue;
        auto& row = truth[target];
        if (std::find(row.malicious.begin(), row.malicious.end(), apex) != row.malicious.end()) continue;
        emit_name(rng, row.ip, apex, {window_start - uniform_int(rng, 30, 400), ref_day});
        row.malicious.push_back(apex);
      }
    }

    Rng vt_rng(derive_seed(cfg.seed, "vt"));
    std::vector<VtEntry> feed;
    for (const auto& [apex, home] : malicious_home) {
      const int forms = static_cast<int>(uniform_int(vt_rng, 1, 3));
      for (int f = 0; f < forms; ++f) {
        const int positives = static_cast<int>(uniform_int(vt_rng, 5, 40));
        switch (f) {
          case 0: feed.push_back({apex, positives}); break;
          case 1: feed.push_back({"login." + apex, positives}); break;
          default: feed.push_back({fmt::format("http://www.{}/path/{}", apex, base36(vt_rng() % 100000)), positives});
        }
      }
    }
    for (const auto& apex : benign_hosting_apexes) feed.push_back({apex, static_cast<int>(uniform_int(vt_rng, 0, 4))});
    const std::size_t unresolved = (malicious_home.size() + 49) / 50;
    for (std::size_t u = 0; u < unresolved; ++u)
      feed.push_back({fmt::format("gone{}.com", base36(u)), static_cast<int>(uniform_int(vt_rng, 5, 40))});
    std::shuffle(feed.begin(), feed.end(), vt_rng);
    for (const auto& e : feed) sink.vt(e);
  }
};

} // namespace

void generate(const GenerateConfig& cfg, CorpusSink& sink) {
  validate_profile(cfg.profiles.nonhosting, "nonhosting");
  validate_profile(cfg.profiles.hosting, "hosting");
  validate_profile(cfg.profiles.dedicated, "dedicated");
  validate_profile(cfg.profiles.shared, "shared");
  if (cfg.window_days < 2) fail(errc::config, "window_days must be at least 2");
  if (cfg.horizon_years < 1) fail(errc::config, "horizon_years must be at least 1");
  for (double f : {cfg.privacy_fraction, cfg.redirect_fraction, cfg.noise_capture_fraction, cfg.split_record_fraction})
    if (!(f >= 0 && f <= 1)) fail(errc::config, "fractions must lie in [0, 1]");
  const std::uint64_t total =
      std::uint64_t{cfg.n_nonhosting} + cfg.n_hosting + cfg.n_dedicated + cfg.n_shared;
  if (total == 0) fail(errc::config, "nothing to generate: all class counts are zero");
  if (total > 4'000'000) fail(errc::config, "too many addresses requested");

  Generator g(cfg, sink);
  for (auto c : {Cls::NonHosting, Cls::Hosting, Cls::Dedicated, Cls::Shared})
    g.models[static_cast<int>(c)] = name_model(g.profile(c));

  // Same-class blocks of 1-4 addresses per /24; some /24s sit under a
  // covering /16 of another organization, some have no ASN record at all.
  Rng rng(derive_seed(cfg.seed, "addresses"));
  std::set<std::uint32_t> used_blocks;
  std::map<std::uint32_t, AsnRecord> covering;
  std::vector<AddressPlan> plans;
  std::vector<double> provider_weights;
  for (std::size_t i = 0; i < std::size(kProviders); ++i) provider_weights.push_back(1.0 / double(i + 1));
  std::vector<AsnRecord> asn_records;

  const std::pair<Cls, std::uint32_t> classes[] = {{Cls::NonHosting, cfg.n_nonhosting},
                                                   {Cls::Hosting, cfg.n_hosting},
                                                   {Cls::Dedicated, cfg.n_dedicated},
                                                   {Cls::Shared, cfg.n_shared}};
  for (const auto& [cls, n] : classes) {
    std::uint32_t remaining = n;
    while (remaining > 0) {
      std::uint32_t block;
      do {
        block = static_cast<std::uint32_t>(uniform_int(rng, 11, 223)) << 24 |
                static_cast<std::uint32_t>(uniform_int(rng, 0, 255)) << 16 |
                static_cast<std::uint32_t>(uniform_int(rng, 0, 255)) << 8;
      } while (!used_blocks.insert(block).second);
      const auto size = std::min<std::uint32_t>(remaining, static_cast<std::uint32_t>(uniform_int(rng, 1, 4)));
      std::set<std::uint32_t> hosts;
      while (hosts.size() < size) hosts.insert(static_cast<std::uint32_t>(uniform_int(rng, 1, 254)));
      for (auto h : hosts) plans.push_back({IpV4(block | h), cls, 0});
      remaining -= size;

      const bool hosting = cls != Cls::NonHosting;
      const double u = uniform(rng);
      if (u < 0.1) continue;  // unmatched block
      const std::size_t org = hosting ? weighted_pick(rng, provider_weights)
                                      : static_cast<std::size_t>(uniform_int(rng, 0, std::size(kIsps) - 1));
      AsnRecord rec{Cidr(IpV4(block), 24), static_cast<std::uint32_t>(hosting ? 64500 + org : 65100 + org),
                    hosting ? kProviders[org] : kIsps[org]};
      if (u < 0.3) {
        const std::uint32_t b16 = block & 0xFFFF0000u;
        if (!covering.contains(b16)) {
          const auto isp = static_cast<std::size_t>(uniform_int(rng, 0, std::size(kIsps) - 1));
          covering[b16] = {Cidr(IpV4(b16), 16), static_cast<std::uint32_t>(65100 + isp), kIsps[isp]};
        }
        if (u < 0.2) continue;  // only the covering /16 applies
      }
      asn_records.push_back(std::move(rec));
    }
  }
  for (auto& [b, rec] : covering) asn_records.push_back(rec);
  std::sort(asn_records.begin(), asn_records.end(), [](const AsnRecord& a, const AsnRecord& b) {
    return std::pair(a.cidr.base(), a.cidr.length()) < std::pair(b.cidr.base(), b.cidr.length());
  });
  for (const auto& r : asn_records) sink.asn(r);

  std::sort(plans.begin(), plans.end(), [](const AddressPlan& a, const AddressPlan& b) { return a.ip < b.ip; });
  for (std::size_t i = 0; i < plans.size(); ++i) plans[i].index = i;
  for (const auto& p : plans) g.address(p);

  if (cfg.malicious) g.cross_plant_and_feed();
  for (auto& t : g.truth) {
    std::sort(t.malicious.begin(), t.malicious.end());
    sink.truth(t);
  }
}

namespace {

class MemorySink : public CorpusSink {
public:
  explicit MemorySink(SynthCorpus& c) : corpus_(c), builder_(c.suffixes) {}
  void pdns(const PdnsRecord& r) override { builder_.add(r); }
  void whois(const WhoisSnapshot& s) override {
    snapshots_.push_back(s);
    snapshots_.back().owner = normalize_org(s.owner);
  }
  void asn(const AsnRecord& r) override { asn_.push_back(r); }
  void domain_whois(const DomainWhois& w) override { corpus_.domain_whois[w.domain] = w; }
  void redirect(const RedirectEdge& e) override { corpus_.redirects.push_back(e); }
  void vt(const VtEntry& e) override { corpus_.vt_feed.push_back(e); }
  void truth(const TruthRow& t) override { corpus_.truth.push_back(t); }

  void finish(int horizon_years) {
    corpus_.pdns = std::move(builder_).build();
    corpus_.whois = WhoisStore(std::move(snapshots_), horizon_years);
    corpus_.asn = AsnDb(std::move(asn_));
  }

private:
  SynthCorpus& corpus_;
  PdnsStore::Builder builder_;
  std::vector<WhoisSnapshot> snapshots_;
  std::vector<AsnRecord> asn_;
};

class FileSink : public CorpusSink {
public:
  explicit FileSink(const std::filesystem::path& dir) : dir_(dir) {
    for (const char* name : {corpus_files::pdns, corpus_files::whois, corpus_files::asn, corpus_files::domain_whois,
                             corpus_files::redirects, corpus_files::vt_feed, corpus_files::truth}) {
      files_.emplace_back(dir / name, std::ios::binary);
      if (!files_.back()) fail(errc::io, fmt::format("cannot write '{}'", (dir / name).string()));
      paths_.push_back(dir / name);
    }
  }
  void pdns(const PdnsRecord& r) override { files_[0] << format_pdns_line(r) << '\n'; }
  void whois(const WhoisSnapshot& s) override { files_[1] << format_whois_line(s) << '\n'; }
  void asn(const AsnRecord& r) override { files_[2] << format_asn_line(r) << '\n'; }
  void domain_whois(const DomainWhois& w) override { files_[3] << format_domain_whois_line(w) << '\n'; }
  void redirect(const RedirectEdge& e) override { files_[4] << format_redirect_line(e) << '\n'; }
  void vt(const VtEntry& e) override { files_[5] << format_vt_line(e) << '\n'; }
  void truth(const TruthRow& t) override { files_[6] << format_truth_line(t) << '\n'; }

  std::vector<std::filesystem::path> close() {
    for (std::size_t i = 0; i < files_.size(); ++i) {
      files_[i].close();
      if (!files_[i]) fail(errc::io, fmt::format("write to '{}' failed", paths_[i].string()));
    }
    return paths_;
  }

private:
  std::filesystem::path dir_;
  std::vector<std::ofstream> files_;
  std::vector<std::filesystem::path> paths_;
};

} // namespace

SynthCorpus generate_corpus(const GenerateConfig& config) {
  SynthCorpus corpus;
  corpus.suffixes = synth_suffixes();
  MemorySink sink(corpus);
  generate(config, sink);
  sink.finish(config.horizon_years);
  return corpus;
}

std::vector<std::filesystem::path> write_corpus(const GenerateConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(errc::io, fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  FileSink sink(out_dir);
  generate(config, sink);
  auto paths = sink.close();

  const auto suffix_path = out_dir / corpus_files::suffixes;
  std::ofstream suffixes(suffix_path, std::ios::binary);
  for (const auto& s : synth_suffix_entries()) suffixes << s << '\n';
  const auto config_path = out_dir / corpus_files::config;
  std::ofstream cfg(config_path, std::ios::binary);
  cfg << config_json(config).dump(2) << '\n';
  if (!suffixes || !cfg) fail(errc::io, fmt::format("write into '{}' failed", out_dir.string()));
  paths.push_back(suffix_path);
  paths.push_back(config_path);
  return paths;
}

} // namespace hostscope
