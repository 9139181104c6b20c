#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equipart/constraint_model.hpp"
#include "equipart/obstruction.hpp"
#include "json.hpp"

namespace equipart {

enum class AtlasUniverse { kAllPairs, kStarLast, kAllButFirstPair, kCustom };

// Orthogonality candidates are the subsets of the chosen universe.  For the
// all-pairs universe only {} and the full set are tried unless
// full_ortho_subsets is set (allowed for k <= 3).
struct AtlasQuery {
  int k = 2;
  int d_min = 2;
  int d_max = 2;
  bool allow_ortho = true;
  bool allow_affine = true;
  AtlasUniverse universe = AtlasUniverse::kStarLast;
  std::vector<OrthoPair> custom_ortho;
  bool full_ortho_subsets = false;
  int max_m = 3;
  int max_a = 2;
  CheckMode mode = CheckMode::kStrict;
  bool require_optimal = false;
  int require_maximal_j = 0;
  bool require_balanced = false;
  std::uint64_t candidate_limit = 10'000'000;
  int jobs = 1;

  nlohmann::json to_json() const;
  static AtlasQuery from_json(const nlohmann::json& doc);
};

struct AtlasRow {
  ConstraintProblem problem;
  int d;
  Certificate certificate;
  Classification classification;
  std::optional<std::string> known_ref;

  nlohmann::json to_json() const;
};

// Raw candidate count before pruning; the quantity the search-space guard
// compares against candidate_limit.
std::uint64_t estimate_candidates(const AtlasQuery& query);

// Ortho sets the query will try, in sorted order.
std::vector<std::vector<OrthoPair>> ortho_candidates(const AtlasQuery& query);

// Every certified instance within the caps, ordered by (d, m, a, ortho).
std::vector<AtlasRow> enumerate(const AtlasQuery& query);

enum class ReportFormat { kJson, kCsv, kMarkdown };
ReportFormat parse_report_format(std::string_view text);

std::string emit_report(const std::vector<AtlasRow>& rows,
                        ReportFormat format);

}  // namespace equipart
