#include "equipart/atlas.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

#include "equipart/errors.hpp"
#include "equipart/known_values.hpp"

namespace equipart {

namespace {

std::string_view universe_name(AtlasUniverse u) {
  switch (u) {
    case AtlasUniverse::kAllPairs: return "all";
    case AtlasUniverse::kStarLast: return "star";
    case AtlasUniverse::kAllButFirstPair: return "all-but-12";
    case AtlasUniverse::kCustom: return "custom";
  }
  return "custom";
}

AtlasUniverse parse_universe(std::string_view text) {
  if (text == "all") return AtlasUniverse::kAllPairs;
  if (text == "star") return AtlasUniverse::kStarLast;
  if (text == "all-but-12") return AtlasUniverse::kAllButFirstPair;
  if (text == "custom") return AtlasUniverse::kCustom;
  throw Error(ErrorKind::kUsage, "unknown ortho universe '" +
                                     std::string(text) +
                                     "' (all|star|all-but-12|custom)");
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

// Advances v through {0..cap}^n in lexicographic order; false when done.
bool next_vector(std::vector<int>& v, int cap) {
  for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i) {
    if (v[i] < cap) {
      ++v[i];
      std::fill(v.begin() + i + 1, v.end(), 0);
      return true;
    }
  }
  return false;
}

struct Candidate {
  int d;
  ConstraintProblem problem;
};

std::string bracket(const std::vector<int>& v) {
  return nlohmann::json(v).dump();
}

std::string pairs_text(const std::vector<OrthoPair>& pairs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [r, s] : pairs) j.push_back({r + 1, s + 1});
  return j.dump();
}

std::string extra_text(const std::vector<SignVector>& extra) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& f : extra) j.push_back(f.bits());
  return j.dump();
}

std::vector<std::string> row_cells(const AtlasRow& row) {
  const auto& c = row.certificate;
  const auto& cl = row.classification;
  return {std::to_string(row.problem.k()),
          std::to_string(row.d),
          bracket(row.problem.m()),
          bracket(row.problem.a()),
          pairs_text(row.problem.ortho()),
          extra_text(row.problem.extra()),
          std::to_string(c.form_count),
          std::to_string(c.kd),
          std::string(to_string(c.mode)),
          std::string(to_string(c.verdict)),
          cl.optimal ? (*cl.optimal ? "true" : "false") : "n/a",
          std::to_string(cl.j_maximal),
          cl.balanced ? "true" : "false",
          cl.tight ? "true" : "false",
          row.known_ref.value_or("")};
}

const std::vector<std::string>& columns() {
  static const std::vector<std::string> cols{
      "k",    "d",       "m",       "a",         "ortho",
      "extra", "D",      "kd",      "mode",      "verdict",
      "optimal", "j_maximal", "balanced", "tight", "known_ref"};
  return cols;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

nlohmann::json AtlasQuery::to_json() const {
  nlohmann::json custom = nlohmann::json::array();
  for (const auto& [r, s] : custom_ortho) custom.push_back({r + 1, s + 1});
  return {{"k", k},
          {"d_min", d_min},
          {"d_max", d_max},
          {"allow_ortho", allow_ortho},
          {"allow_affine", allow_affine},
          {"ortho_universe", universe_name(universe)},
          {"custom_ortho", custom},
          {"full_ortho_subsets", full_ortho_subsets},
          {"max_m", max_m},
          {"max_a", max_a},
          {"mode", to_string(mode)},
          {"require_optimal", require_optimal},
          {"require_maximal_j", require_maximal_j},
          {"require_balanced", require_balanced},
          {"candidate_limit", candidate_limit},
          {"jobs", jobs}};
}

AtlasQuery AtlasQuery::from_json(const nlohmann::json& doc) {
  try {
    AtlasQuery q;
    q.k = doc.at("k").get<int>();
    if (doc.contains("d")) {
      q.d_min = q.d_max = doc.at("d").get<int>();
    }
    q.d_min = doc.value("d_min", q.d_min);
    q.d_max = doc.value("d_max", q.d_max);
    q.allow_ortho = doc.value("allow_ortho", q.allow_ortho);
    q.allow_affine = doc.value("allow_affine", q.allow_affine);
    q.universe = parse_universe(doc.value("ortho_universe", "star"));
    if (doc.contains("custom_ortho")) {
      for (const auto& pr : doc.at("custom_ortho")) {
        const auto v = pr.get<std::vector<int>>();
        if (v.size() != 2) {
          throw Error(ErrorKind::kConfig, "custom_ortho entries must be [r,s]");
        }
        q.custom_ortho.emplace_back(v[0] - 1, v[1] - 1);
      }
    }
    q.full_ortho_subsets = doc.value("full_ortho_subsets", false);
    q.max_m = doc.value("max_m", q.max_m);
    q.max_a = doc.value("max_a", q.max_a);
    q.mode = parse_check_mode(doc.value("mode", "strict"));
    q.require_optimal = doc.value("require_optimal", false);
    q.require_maximal_j = doc.value("require_maximal_j", 0);
    q.require_balanced = doc.value("require_balanced", false);
    q.candidate_limit = doc.value("candidate_limit", q.candidate_limit);
    q.jobs = doc.value("jobs", q.jobs);
    return q;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kConfig,
                std::string("malformed atlas query: ") + ex.what());
  }
}

nlohmann::json AtlasRow::to_json() const {
  const auto& c = certificate;
  nlohmann::json doc{
      {"problem", problem.to_json()},
      {"d", d},
      {"certificate",
       {{"mode", to_string(c.mode)},
        {"D", c.form_count},
        {"kd", c.kd},
        {"verdict", to_string(c.verdict)},
        {"h_is_top", c.h_is_top},
        {"h_is_zero", c.h_is_zero},
        {"h_digest", c.h_digest},
        {"tight", c.tight}}},
      {"classification", classification.to_json()}};
  doc["known_ref"] = known_ref ? nlohmann::json(*known_ref) : nullptr;
  return doc;
}

std::vector<std::vector<OrthoPair>> ortho_candidates(const AtlasQuery& query) {
  std::vector<std::vector<OrthoPair>> out{{}};
  if (!query.allow_ortho) return out;
  std::vector<OrthoPair> universe;
  switch (query.universe) {
    case AtlasUniverse::kAllPairs:
      universe = ortho_set(OrthoUniverse::kAllPairs, query.k);
      break;
    case AtlasUniverse::kStarLast:
      universe = ortho_set(OrthoUniverse::kStarLast, query.k);
      break;
    case AtlasUniverse::kAllButFirstPair:
      universe = ortho_set(OrthoUniverse::kAllButFirstPair, query.k);
      break;
    case AtlasUniverse::kCustom:
      universe = query.custom_ortho;
      break;
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  if (universe.empty()) return out;

  const bool all_subsets =
      query.universe != AtlasUniverse::kAllPairs || query.full_ortho_subsets;
  if (!all_subsets) {
    out.push_back(universe);
    return out;
  }
  if (universe.size() > 20) {
    throw Error(ErrorKind::kSearchSpace,
                "ortho universe too large for subset enumeration");
  }
  out.clear();
  for (std::uint32_t bits = 0; bits < (1u << universe.size()); ++bits) {
    std::vector<OrthoPair> subset;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if ((bits >> i) & 1u) subset.push_back(universe[i]);
    }
    out.push_back(std::move(subset));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t estimate_candidates(const AtlasQuery& query) {
  std::uint64_t total =
      static_cast<std::uint64_t>(std::max(0, query.d_max - query.d_min + 1));
  for (int i = 0; i < query.k; ++i) {
    total = saturating_mul(total, static_cast<std::uint64_t>(query.max_m) + 1);
    if (query.allow_affine) {
      total =
          saturating_mul(total, static_cast<std::uint64_t>(query.max_a) + 1);
    }
  }
  std::uint64_t ortho = 1;
  if (query.allow_ortho) {
    if (query.universe == AtlasUniverse::kAllPairs &&
        !query.full_ortho_subsets) {
      ortho = 2;
    } else {
      const auto n = query.universe == AtlasUniverse::kCustom
                         ? query.custom_ortho.size()
                         : ortho_set(query.universe == AtlasUniverse::kAllPairs
                                         ? OrthoUniverse::kAllPairs
                                     : query.universe == AtlasUniverse::kStarLast
                                         ? OrthoUniverse::kStarLast
                                         : OrthoUniverse::kAllButFirstPair,
                                     query.k)
                               .size();
      ortho = n >= 63 ? std::numeric_limits<std::uint64_t>::max()
                      : (std::uint64_t{1} << n);
    }
  }
  return saturating_mul(total, ortho);
}

std::vector<AtlasRow> enumerate(const AtlasQuery& query) {
  if (query.k < 1 || query.k > 8) {
    throw Error(ErrorKind::kUsage, "atlas needs 1 <= k <= 8");
  }
  if (query.d_min < 1 || query.d_max < query.d_min) {
    throw Error(ErrorKind::kUsage, "atlas needs 1 <= d_min <= d_max");
  }
  if (query.max_m < 0 || query.max_a < 0) {
    throw Error(ErrorKind::kUsage, "atlas caps must be >= 0");
  }
  if (query.full_ortho_subsets && query.k > 3) {
    throw Error(ErrorKind::kUsage,
                "full orthogonality-subset enumeration is limited to k <= 3");
  }
  const auto estimate = estimate_candidates(query);
  if (estimate > query.candidate_limit) {
    throw Error(ErrorKind::kSearchSpace,
                "atlas search space estimate " + std::to_string(estimate) +
                    " exceeds limit " + std::to_string(query.candidate_limit));
  }

  const int k = query.k;
  const auto orthos = ortho_candidates(query);
  std::vector<std::int64_t> weight(k);
  for (int i = 0; i < k; ++i) weight[i] = (std::int64_t{1} << (k - i)) - 1;

  // Counting prune: only candidates with C = kd (strict) or 0 < C <= kd
  // (relaxed) reach the polynomial check.
  std::vector<Candidate> candidates;
  for (int d = query.d_min; d <= query.d_max; ++d) {
    const std::int64_t kd = static_cast<std::int64_t>(k) * d;
    std::vector<int> m(k, 0);
    do {
      std::int64_t cm = 0;
      for (int i = 0; i < k; ++i) cm += m[i] * weight[i];
      if (cm > kd) continue;
      std::vector<int> a(k, 0);
      do {
        std::int64_t ca = cm;
        for (int v : a) ca += v;
        if (ca > kd) continue;
        for (const auto& ortho : orthos) {
          const std::int64_t c = ca + static_cast<std::int64_t>(ortho.size());
          const bool keep = query.mode == CheckMode::kStrict
                                ? c == kd
                                : (c >= 1 && c <= kd);
          if (keep) candidates.push_back({d, ConstraintProblem(k, m, a, ortho)});
        }
      } while (query.allow_affine && next_vector(a, query.max_a));
    } while (next_vector(m, query.max_m));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              return std::tie(x.d, x.problem.m(), x.problem.a(),
                              x.problem.ortho()) <
                     std::tie(y.d, y.problem.m(), y.problem.a(),
                              y.problem.ortho());
            });

  std::vector<std::optional<AtlasRow>> slots(candidates.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t idx = next++; idx < candidates.size(); idx = next++) {
      const auto& cand = candidates[idx];
      auto cert = check(cand.problem, cand.d, query.mode);
      if (!cert.certified()) continue;
      auto cls = classify(cand.problem, cand.d);
      if (query.require_optimal && !(cls.optimal && *cls.optimal)) continue;
      if (cls.j_maximal < query.require_maximal_j) continue;
      if (query.require_balanced && !cls.balanced) continue;
      std::optional<std::string> known;
      const auto hits = lookup_known(cand.problem);
      if (!hits.empty()) known = hits.front()->id;
      slots[idx] = AtlasRow{cand.problem, cand.d, std::move(cert),
                            std::move(cls), std::move(known)};
    }
  };
  const int jobs = std::max(1, query.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<AtlasRow> rows;
  for (auto& slot : slots) {
    if (slot) rows.push_back(std::move(*slot));
  }
  return rows;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  throw Error(ErrorKind::kUsage, "unknown report format '" +
                                     std::string(text) +
                                     "' (json|csv|markdown)");
}

std::string emit_report(const std::vector<AtlasRow>& rows,
                        ReportFormat format) {
  std::ostringstream os;
  switch (format) {
    case ReportFormat::kJson: {
      nlohmann::json doc = nlohmann::json::array();
      for (const auto& row : rows) doc.push_back(row.to_json());
      os << doc.dump(2) << '\n';
      break;
    }
    case ReportFormat::kCsv: {
      const auto& cols = columns();
      for (std::size_t i = 0; i < cols.size(); ++i) {
        os << (i ? "," : "") << cols[i];
      }
      os << '\n';
      for (const auto& row : rows) {
        const auto cells = row_cells(row);
        for (std::size_t i = 0; i < cells.size(); ++i) {
          os << (i ? "," : "") << csv_escape(cells[i]);
        }
        os << '\n';
      }
      break;
    }
    case ReportFormat::kMarkdown: {
      const auto& cols = columns();
      os << '|';
      for (const auto& c : cols) os << ' ' << c << " |";
      os << "\n|";
      for (std::size_t i = 0; i < cols.size(); ++i) os << "---|";
      os << '\n';
      for (const auto& row : rows) {
        os << '|';
        for (const auto& cell : row_cells(row)) os << ' ' << cell << " |";
        os << '\n';
      }
      break;
    }
  }
  return os.str();
}

}  // namespace equipart
