#include "datamodel.hpp"
#include "error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <fstream>

#include <random>

using namespace hostscope;

namespace {

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return errc::internal;
}

} // namespace

TEST_CASE("ipv4 parse and format") {
  CHECK(IpV4::parse("1.2.3.4") == IpV4(1, 2, 3, 4));
  CHECK(IpV4::parse("255.255.255.255").value() == 0xFFFFFFFFu);
  CHECK(IpV4(10, 0, 0, 1).to_string() == "10.0.0.1");
  CHECK(IpV4(10, 0, 0, 1).octet(0) == 10);
  CHECK_FALSE(IpV4::try_parse("1.2.3"));
  CHECK_FALSE(IpV4::try_parse("1.2.3.256"));
  CHECK_FALSE(IpV4::try_parse("01.2.3.4"));
  CHECK_FALSE(IpV4::try_parse(" 1.2.3.4"));
  CHECK(code_of([] { IpV4::parse("2001:db8::1"); }) == errc::unsupported);
  CHECK(code_of([] { IpV4::parse("a.b.c.d"); }) == errc::parse);
  CHECK(IpV4(1, 2, 3, 4) < IpV4(1, 2, 3, 5));
  CHECK(IpV4(9, 0, 0, 0) < IpV4(10, 0, 0, 0));
}

TEST_CASE("ipv4 text round trip") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const IpV4 ip(static_cast<std::uint32_t>(rng()));
    CHECK(IpV4::parse(ip.to_string()) == ip);
  }
}

TEST_CASE("prefix24 and cidr") {
  const Prefix24 p(IpV4(1, 2, 3, 77));
  CHECK(p.base() == IpV4(1, 2, 3, 0));
  CHECK(p.contains(IpV4(1, 2, 3, 255)));
  CHECK_FALSE(p.contains(IpV4(1, 2, 4, 0)));
  CHECK(p.at(9) == IpV4(1, 2, 3, 9));

  const auto c = Cidr::parse("1.2.3.4/16");
  CHECK(c.base() == IpV4(1, 2, 0, 0));
  CHECK(c.to_string() == "1.2.0.0/16");
  CHECK(c.contains(IpV4(1, 2, 200, 1)));
  CHECK_FALSE(c.contains(IpV4(1, 3, 0, 0)));
  CHECK(Cidr::parse("0.0.0.0/0").contains(IpV4(200, 1, 1, 1)));
  CHECK(Cidr::parse("9.9.9.9/32").contains(IpV4(9, 9, 9, 9)));
  CHECK(code_of([] { Cidr::parse("1.2.3.0/33"); }) == errc::parse);
  CHECK(code_of([] { Cidr::parse("1.2.3.0"); }) == errc::parse);
}

TEST_CASE("domain names and registered domains") {
  const SuffixList com({"com"});
  const SuffixList uk({"co.uk", "uk"});

  auto d = DomainName::parse("www.example.com", com);
  CHECK(d.labels() == std::vector<std::string>{"www", "example", "com"});
  CHECK(d.suffix_length() == 1);
  CHECK(d.tld2() == "example.com");
  CHECK(d.tld3() == "www.example.com");

  d = DomainName::parse("a.b.co.uk", uk);
  CHECK(d.suffix_length() == 2);
  CHECK(d.tld2() == "b.co.uk");
  CHECK(d.tld3() == "a.b.co.uk");

  d = DomainName::parse("example.com", com);
  CHECK(d.tld2() == "example.com");
  CHECK_FALSE(d.tld3());

  d = DomainName::parse("mail.shop.example.com", com);
  CHECK(tld2_of(d) == "example.com");
  CHECK(tld3_of(d) == "shop.example.com");

  d = DomainName::parse("com", com);
  CHECK_FALSE(d.tld2());
  CHECK_FALSE(d.tld3());

  d = DomainName::parse("x.y.z.co.uk", uk);
  CHECK(d.tld2() == "z.co.uk");
  CHECK(d.tld3() == "y.z.co.uk");

  // case and trailing dot
  CHECK(DomainName::parse("WWW.Example.COM.", com).text() == "www.example.com");
  // an unlisted TLD still counts as a one-label suffix
  CHECK(DomainName::parse("a.b.example", com).tld2() == "b.example");
}

TEST_CASE("domain name errors name the label") {
  const SuffixList com({"com"});
  CHECK(code_of([&] { DomainName::parse("", com); }) == errc::parse);
  CHECK(code_of([&] { DomainName::parse("a..com", com); }) == errc::parse);
  CHECK(code_of([&] { DomainName::parse("bad_label!.com", com); }) == errc::parse);
  try {
    DomainName::parse(std::string(64, 'x') + ".com", com);
    FAIL("expected a parse error");
  } catch (const error& e) {
    CHECK(std::string(e.what()).find(std::string(64, 'x')) != std::string::npos);
  }
}

TEST_CASE("tld2/tld3 presence follows label count") {
  const std::vector<std::string> entries{"com", "co.uk", "uk", "net"};
  const SuffixList list(entries);
  const std::set<std::string> set(entries.begin(), entries.end());
  std::mt19937_64 rng(11);
  const std::vector<std::string> parts{"a", "b", "co", "uk", "com", "net", "x1", "www"};
  for (int i = 0; i < 2000; ++i) {
    std::string name;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) name += (k ? "." : "") + parts[rng() % parts.size()];
    const auto d = DomainName::parse(name, list);
    const auto s = d.suffix_length(), labels = d.labels().size();
    CHECK(d.tld2().has_value() == (labels >= s + 1));
    CHECK(d.tld3().has_value() == (labels >= s + 2));
    CHECK(d.tld2() == oracle::apex(name, set));
    CHECK(d.tld3() == oracle::tld3(name, set));
  }
}

TEST_CASE("suffix list file skips comments and wildcard rules") {
  const auto path = std::filesystem::temp_directory_path() / "hostscope_psl_test.dat";
  {
    std::ofstream out(path);
    out << "// comment\n\ncom\nco.uk\n*.ck\n!www.ck\n";
  }
  const auto list = SuffixList::load(path);
  std::filesystem::remove(path);
  CHECK(list.size() == 2);
  CHECK(DomainName::parse("a.b.co.uk", list).tld2() == "b.co.uk");
  CHECK(code_of([] { SuffixList::load("/nonexistent/psl.dat"); }) == errc::io);
}

TEST_CASE("inetnum size") {
  WhoisSnapshot s;
  s.range_start = IpV4(10, 0, 0, 0);
  s.range_end = IpV4(10, 0, 0, 255);
  CHECK(inetnum_size(s) == 256);
  s.range_start = s.range_end = IpV4(10, 0, 0, 5);
  CHECK(inetnum_size(s) == 1);
  s.range_start = IpV4(10, 0, 0, 0);
  s.range_end = IpV4(10, 0, 255, 255);
  CHECK(inetnum_size(s) == 65536);
  s.range_start = IpV4(0u);
  s.range_end = IpV4(0xFFFFFFFFu);
  CHECK(inetnum_size(s) == 4294967296ULL);
}

TEST_CASE("org normalization and net types") {
  CHECK(normalize_org("  ACME, Inc.  ") == "acme inc");
  CHECK(normalize_org("Globex\tCorp") == "globex corp");
  CHECK(parse_net_type("Direct Allocation") == NetType::DirectAllocation);
  CHECK(parse_net_type("direct_assignment") == NetType::DirectAssignment);
  CHECK(parse_net_type("REALLOCATED") == NetType::Reallocated);
  CHECK(parse_net_type("Reassigned") == NetType::Reassigned);
  CHECK(parse_net_type("ALLOCATED PA") == NetType::Unknown);
  for (int t = 0; t < kNetTypeCount; ++t) CHECK(parse_net_type(net_type_name(NetType(t))) == NetType(t));
}

TEST_CASE("day index floors toward negative infinity") {
  CHECK(day_of(0) == 0);
  CHECK(day_of(86399) == 0);
  CHECK(day_of(86400) == 1);
  CHECK(day_of(-1) == -1);
  CHECK(day_of(-86400) == -1);
  CHECK(day_of(-86401) == -2);
}

TEST_CASE("stage label spaces") {
  CHECK(stage_labels(Stage::Hosting)[0] == "hosting");
  CHECK(stage_labels(Stage::Hosting)[1] == "non-hosting");
  CHECK(stage_labels(Stage::Dedicated)[0] == "dedicated");
  CHECK(stage_labels(Stage::Dedicated)[1] == "shared");
  CHECK(label_index(Stage::Dedicated, "shared") == 1);
  CHECK_FALSE(label_index(Stage::Hosting, "shared"));
  CHECK(parse_stage("dedicated") == Stage::Dedicated);
  CHECK(code_of([] { parse_stage("tertiary"); }) == errc::invalid_argument);
}
