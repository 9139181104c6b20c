#include "equipart/errors.hpp"

namespace equipart {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kRange: return "range";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kContradiction: return "contradiction";
    case ErrorKind::kFamilyDomain: return "family_domain";
    case ErrorKind::kInternalConsistency: return "internal_consistency";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kInfeasibleByCounting: return "infeasible_by_counting";
    case ErrorKind::kSearchSpace: return "search_space";
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace equipart
