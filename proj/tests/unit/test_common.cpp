#include <catch_amalgamated.hpp>

#include <atomic>
#include <set>
#include <stdexcept>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"
#include "acdc/common/hash.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/common/svg.hpp"

using namespace acdc;

TEST_CASE("csv round trip keeps names and exact numbers") {
  CsvTable t;
  t.header = {"V_AC1-1", "name, with comma", "quote\"d"};
  t.rows = {{format_number(0.1), "a,b", "x"}, {format_number(1.0 / 3.0), "", "\"y\""}};
  const auto back = parse_csv(to_csv_string(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.number(1, 0) == 1.0 / 3.0);
  CHECK(back.column("quote\"d") == 2);
  CHECK_THROWS_AS(back.column("missing"), InvalidInput);
}

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derived seeds are distinct and deterministic") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 200; ++s) seen.insert(derive_seed(42, s));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, "validation") == derive_seed(7, "validation"));
  CHECK(derive_seed(7, "validation") != derive_seed(7, "training"));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  set_max_jobs(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw NumericError("boom");
                  }),
                  NumericError);
  set_max_jobs(0);
}

TEST_CASE("svg output is well formed and escaped") {
  SvgDocument doc(100, 50);
  doc.rect(0, 0, 10, 10, level_color(5));
  doc.text(5, 5, "a<b & c");
  const auto s = doc.str();
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("a&lt;b &amp; c") != std::string::npos);
  CHECK(s.rfind("</svg>") != std::string::npos);
}
