#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "equipart/gf2_ring.hpp"
#include "json.hpp"

namespace equipart {

// Hyperplane pair (r, s), 0-based, r < s.
using OrthoPair = std::pair<int, int>;

// One constrained equipartition instance: k hyperplanes, a cascade vector m
// (stage i masses are equipartitioned by H_i..H_k), affine containment counts
// a (H_i passes through a_i prescribed points), orthogonal pairs, and extra
// raw characters.  Ortho pairs and extra forms are kept sorted so that equal
// instances compare equal regardless of listing order.
class ConstraintProblem {
 public:
  ConstraintProblem(int k, std::vector<int> m, std::vector<int> a = {},
                    std::vector<OrthoPair> ortho = {},
                    std::vector<SignVector> extra = {});

  int k() const { return k_; }
  const std::vector<int>& m() const { return m_; }
  const std::vector<int>& a() const { return a_; }
  const std::vector<OrthoPair>& ortho() const { return ortho_; }
  const std::vector<SignVector>& extra() const { return extra_; }

  ConstraintProblem with_m(std::vector<int> m) const;

  bool operator==(const ConstraintProblem& other) const = default;

  // JSON indices are 1-based: {"k":3,"m":[..],"a":[..],"ortho":[[1,3]],
  // "extra":[[0,1,1]]}.  Missing fields and short m/a vectors pad with zeros.
  nlohmann::json to_json() const;
  static ConstraintProblem from_json(const nlohmann::json& doc);

  // Compact human-readable form, e.g. "k=3 m=(1,1,2) ortho={(2,3)}".
  std::string describe() const;

 private:
  int k_;
  std::vector<int> m_;
  std::vector<int> a_;
  std::vector<OrthoPair> ortho_;
  std::vector<SignVector> extra_;
};

enum class OrthoUniverse {
  kAllPairs,         // every (r, s)
  kStarLast,         // (r, k) for r < k
  kAllButFirstPair,  // every pair except (1, 2)
};

std::vector<OrthoPair> ortho_set(OrthoUniverse universe, int k);

// C = sum_i [m_i (2^{k-i+1} - 1) + a_i] + |ortho| + |extra|.
std::int64_t constraint_dimension(const ConstraintProblem& p);
// ceil(C / k).
std::int64_t lower_bound_dim(const ConstraintProblem& p);
// ceil(m (2^k - 1) / k); m >= 1.
std::int64_t ramos_L(std::int64_t m, int k);
// 2^{q+k-1} + r for m = 2^q + r, 0 <= r < 2^q; m >= 1.
std::int64_t upper_U(std::int64_t m, int k);

// The multiset of characters (linear forms) whose product decides the
// instance.  Order: cascade stages, then containment, then ortho pairs, then
// extra.  Length equals constraint_dimension(p).
std::vector<SignVector> compile_forms(const ConstraintProblem& p);

struct Classification {
  int d = 0;
  std::int64_t lower_dim = 0;
  // Empty when m_1 = 0 (optimality is only defined for m_1 >= 1).
  std::optional<bool> optimal;
  std::vector<int> maximal_stages;  // 1-based
  int j_maximal = 0;
  bool maximal = false;
  bool balanced = false;
  bool tight = false;

  nlohmann::json to_json() const;
};

// Requires d >= lower_bound_dim(p).
Classification classify(const ConstraintProblem& p, int d);

struct FamilyInstance {
  std::string family;
  ConstraintProblem problem;
  int d;
  std::string note;  // empty unless the generator made a documented choice

  nlohmann::json to_json() const;
};

// Pure cascade with affine containment; empty a means all zeros.
FamilyInstance family_cascade(int q, int t, std::vector<int> a, int k);
// Cascade with full orthogonality, t >= 2.
FamilyInstance family_ortho_cascade(int q, int t, std::vector<int> a, int k);
// Orthogonality on every pair except (1,2), k >= 3.
FamilyInstance family_near_ortho(int q, int t, int k);
// Orthogonality between H_k and a subset of H_1..H_{k-1}, k >= 3.
FamilyInstance family_star_ortho(int q, int t, int k,
                                 const std::vector<OrthoPair>& ortho);
// Cascade with t = 2^q: m = (2^q, 2^q, 2^{q+1}, ..., 2^{q+k-2}), d = 2^{q+k-1}.
FamilyInstance family_ham_sandwich_cascade(int q, int k);

// True iff every constraint of `weaker` is also imposed by `stronger`.
bool dominates(const ConstraintProblem& weaker,
               const ConstraintProblem& stronger);

}  // namespace equipart
