#include "feature_table.hpp"
#include "features_dedicated.hpp"
#include "features_hosting.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace hostscope;
using namespace testing_support;

TEST_CASE("schemas") {
  CHECK(feature_schema(Stage::Hosting) == HostingFeatures::schema());
  CHECK(feature_schema(Stage::Dedicated) == DedicatedFeatures::schema());
}

TEST_CASE("feature csv round trip") {
  TempDir dir;
  const auto c = random_corpus(55, 500, 100);
  const auto pdns = make_store(c.pdns, SuffixList(test_suffixes()));
  const WhoisStore whois(c.whois);
  for (Stage stage : {Stage::Hosting, Stage::Dedicated}) {
    auto table = build_feature_table(pdns, whois, c.ips, c.reference, stage, 3);
    for (std::size_t i = 0; i < table.ips.size(); i += 2) table.labels[i] = static_cast<std::uint8_t>(i % 4 == 0);
    const auto serial = build_feature_table(pdns, whois, c.ips, c.reference, stage, 1);
    CHECK(serial.values == table.values);
    write_feature_csv(dir / "f.csv", table);
    const auto back = read_feature_csv(dir / "f.csv");
    CHECK(back.stage == stage);
    CHECK(back.ips == table.ips);
    CHECK(back.values == table.values);
    CHECK(back.labels == table.labels);
    const auto ds = back.to_dataset();
    CHECK(ds.size() == (table.ips.size() + 1) / 2);
    CHECK(ds.ids[0] == table.ips[0].to_string());
  }
}

TEST_CASE("feature csv header check") {
  TempDir dir;
  write_file(dir / "f.csv", "ip,wrong,columns\n1.2.3.4,1,2\n");
  try {
    read_feature_csv(dir / "f.csv");
    FAIL("accepted a foreign header");
  } catch (const error& e) {
    CHECK(e.code() == errc::schema);
  }
}

TEST_CASE("label maps") {
  TempDir dir;
  write_file(dir / "t.jsonl",
             R"({"ip":"1.0.0.1","stage1_truth":"hosting","stage2_truth":"shared"})"
             "\n"
             R"({"ip":"1.0.0.2","stage1_truth":"non-hosting","stage2_truth":null})"
             "\n");
  const auto s1 = load_label_map(dir / "t.jsonl", Stage::Hosting);
  CHECK(s1.at(IpV4(1, 0, 0, 1)) == 0);
  CHECK(s1.at(IpV4(1, 0, 0, 2)) == 1);
  const auto s2 = load_label_map(dir / "t.jsonl", Stage::Dedicated);
  CHECK(s2.size() == 1);
  CHECK(s2.at(IpV4(1, 0, 0, 1)) == 1);

  write_file(dir / "l.csv", "ip,label,rule\n1.0.0.1,dedicated,single_domain\n1.0.0.2,NA,undecidable\n");
  CHECK(load_label_map(dir / "l.csv", Stage::Dedicated).size() == 1);
  try {
    load_label_map(dir / "l.csv", Stage::Hosting);
    FAIL("labels CSV accepted for stage 1");
  } catch (const error& e) {
    CHECK(e.code() == errc::stage);
  }
}

TEST_CASE("address lists") {
  TempDir dir;
  write_file(dir / "ips.txt", "ip\n# note\n\n1.2.3.4\n5.6.7.8,extra\n");
  CHECK(read_ip_list(dir / "ips.txt") == std::vector<IpV4>{IpV4(1, 2, 3, 4), IpV4(5, 6, 7, 8)});
  write_file(dir / "v6.txt", "::1\n");
  try {
    read_ip_list(dir / "v6.txt");
    FAIL("accepted IPv6");
  } catch (const error& e) {
    CHECK(e.code() == errc::unsupported);
  }
}
