#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "equipart/constraint_model.hpp"
#include "equipart/gf2_ring.hpp"
#include "json.hpp"

namespace equipart {

// strict:  exactly kd forms, certified iff h = u_1^d ... u_k^d.
// relaxed: D <= kd forms, certified iff h != 0 (nonvanishing top
//          Stiefel-Whitney class of the D-dimensional bundle).
enum class CheckMode { kStrict, kRelaxed };
enum class Verdict { kCertified, kInconclusive };

std::string_view to_string(CheckMode mode);
std::string_view to_string(Verdict verdict);
CheckMode parse_check_mode(std::string_view text);

// Outcome of the criterion at one dimension.  Inconclusive never means the
// instance is impossible: the criterion is one-sided.
struct Certificate {
  explicit Certificate(ConstraintProblem p) : problem(std::move(p)) {}

  ConstraintProblem problem;
  int d = 0;
  CheckMode mode = CheckMode::kStrict;
  std::int64_t form_count = 0;  // D
  std::int64_t kd = 0;
  Verdict verdict = Verdict::kInconclusive;
  bool h_is_top = false;
  bool h_is_zero = true;
  std::string h_digest;
  bool tight = false;
  std::optional<std::string> derivation;
  std::optional<TruncatedPolynomial> polynomial;  // kept only on request

  bool certified() const { return verdict == Verdict::kCertified; }

  nlohmann::json to_json() const;
  static Certificate from_json(const nlohmann::json& doc);
};

Certificate check(const ConstraintProblem& p, int d, CheckMode mode,
                  bool keep_polynomial = false);

// Smallest d in [lower_bound_dim(p), d_max] whose check certifies.  Strict
// mode only probes d = C/k, and only when k divides C.
std::optional<Certificate> find_min_certified_d(const ConstraintProblem& p,
                                                int d_max, CheckMode mode);

// Transfers a certificate of `source` to an instance it dominates.  The
// result keeps the source's polynomial audit fields, records the derivation,
// and makes no tightness claim.
Certificate derive_by_domination(const ConstraintProblem& weaker,
                                 const Certificate& source);

// prod_{j<=r<s<=k} (u_r + u_s) against its permutation expansion (1-based j).
bool verify_vandermonde(int k, int j, int d);
// prod of all nonzero forms on u_i..u_k against the Dickson expansion.
bool verify_dickson(int k, int i, int d);
// prod_{i<=r<=k} u_r^{i-1} * prod_{i<=r<s<=k} (u_r + u_s) against
// sum over permutations of u^{k-1} ... u^{i-1}.
bool verify_pki_ortho(int k, int i, int d);

}  // namespace equipart
