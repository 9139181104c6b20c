#include <algorithm>

#include "brute_atlas.hpp"
#include "doctest.h"
#include "equipart/atlas.hpp"
#include "support.hpp"

using namespace equipart;

namespace {

std::vector<oracle::BruteRow> as_brute(const std::vector<AtlasRow>& rows) {
  std::vector<oracle::BruteRow> out;
  for (const auto& r : rows) {
    out.push_back({r.d, r.problem.m(), r.problem.a(), r.problem.ortho()});
  }
  return out;
}

AtlasQuery small_query() {
  AtlasQuery q;
  q.k = 2;
  q.d_min = 2;
  q.d_max = 4;
  q.max_m = 3;
  q.max_a = 2;
  q.universe = AtlasUniverse::kAllPairs;
  q.full_ortho_subsets = true;
  return q;
}

}  // namespace

TEST_SUITE("atlas") {

TEST_CASE("matches the brute-force enumerator for k=2, d <= 4") {
  const auto rows = enumerate(small_query());
  const auto brute = oracle::brute_atlas(2, 2, 4, 3, 2);
  CHECK(!rows.empty());
  CHECK(as_brute(rows) == brute);
}

TEST_CASE("matches the brute-force enumerator for k=3, d=4") {
  AtlasQuery q = small_query();
  q.k = 3;
  q.d_min = q.d_max = 4;
  q.max_m = 2;
  q.max_a = 1;
  const auto rows = enumerate(q);
  CHECK(as_brute(rows) == oracle::brute_atlas(3, 4, 4, 2, 1));
}

TEST_CASE("rows are sorted, tight, and certified") {
  const auto rows = enumerate(small_query());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].certificate.certified());
    CHECK(rows[i].certificate.form_count == rows[i].certificate.kd);
    CHECK(rows[i].classification.tight);
  }
  CHECK(std::is_sorted(rows.begin(), rows.end(), [](const AtlasRow& x, const AtlasRow& y) {
    return std::tie(x.d, x.problem.m(), x.problem.a(), x.problem.ortho()) <
           std::tie(y.d, y.problem.m(), y.problem.a(), y.problem.ortho());
  }));
}

TEST_CASE("known values are attached") {
  const auto rows = enumerate(small_query());
  const auto it = std::find_if(rows.begin(), rows.end(), [](const AtlasRow& r) {
    return r.d == 2 && r.problem == ConstraintProblem(2, {1, 1});
  });
  REQUIRE(it != rows.end());
  CHECK(it->known_ref.has_value());
}

TEST_CASE("filters") {
  AtlasQuery q = small_query();
  q.require_optimal = true;
  for (const auto& r : enumerate(q)) CHECK(r.classification.optimal == std::optional<bool>(true));
  q = small_query();
  q.require_maximal_j = 2;
  for (const auto& r : enumerate(q)) CHECK(r.classification.maximal);
  q = small_query();
  q.allow_ortho = false;
  q.allow_affine = false;
  for (const auto& r : enumerate(q)) {
    CHECK(r.problem.ortho().empty());
    CHECK(r.problem.a() == std::vector<int>{0, 0});
  }
}

TEST_CASE("relaxed rows have nonzero products and D <= kd") {
  AtlasQuery q = small_query();
  q.mode = CheckMode::kRelaxed;
  q.d_max = 3;
  const auto rows = enumerate(q);
  CHECK(rows.size() > enumerate(small_query()).size() / 3);
  for (const auto& r : rows) {
    CHECK(!r.certificate.h_is_zero);
    CHECK(r.certificate.form_count <= r.certificate.kd);
  }
}

TEST_CASE("ortho candidate sets") {
  AtlasQuery q;
  q.k = 3;
  q.universe = AtlasUniverse::kStarLast;
  CHECK(ortho_candidates(q).size() == 4);
  q.universe = AtlasUniverse::kAllPairs;
  CHECK(ortho_candidates(q).size() == 2);
  q.full_ortho_subsets = true;
  CHECK(ortho_candidates(q).size() == 8);
  q.allow_ortho = false;
  CHECK(ortho_candidates(q).size() == 1);
}

TEST_CASE("search-space guard and argument checks") {
  AtlasQuery q = small_query();
  q.candidate_limit = 10;
  CHECK(kind_of([&] { enumerate(q); }) == ErrorKind::kSearchSpace);
  q = small_query();
  q.k = 4;
  CHECK(kind_of([&] { enumerate(q); }) == ErrorKind::kUsage);
  q = small_query();
  q.d_max = 1;
  CHECK(kind_of([&] { enumerate(q); }) == ErrorKind::kUsage);
}

TEST_CASE("parallel enumeration gives identical output") {
  AtlasQuery q = small_query();
  const auto serial = emit_report(enumerate(q), ReportFormat::kCsv);
  q.jobs = 3;
  CHECK(emit_report(enumerate(q), ReportFormat::kCsv) == serial);
}

TEST_CASE("reports") {
  const auto rows = enumerate(small_query());
  const auto csv = emit_report(rows, ReportFormat::kCsv);
  CHECK(csv.rfind("k,d,m,a,ortho,extra,D,kd,mode,verdict,optimal,j_maximal,balanced,tight,known_ref\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(rows.size() + 1));
  CHECK(emit_report(rows, ReportFormat::kCsv) == csv);
  const auto md = emit_report(rows, ReportFormat::kMarkdown);
  CHECK(md.rfind("| k | d | m |", 0) == 0);
  const auto js = nlohmann::json::parse(emit_report(rows, ReportFormat::kJson));
  CHECK(js.size() == rows.size());
  CHECK(kind_of([] { parse_report_format("xml"); }) == ErrorKind::kUsage);
}

TEST_CASE("query JSON round trip") {
  AtlasQuery q = small_query();
  q.require_balanced = true;
  const auto back = AtlasQuery::from_json(q.to_json());
  CHECK(back.to_json() == q.to_json());
  CHECK(kind_of([] { AtlasQuery::from_json(nlohmann::json::object()); }) == ErrorKind::kConfig);
}

}  // TEST_SUITE
