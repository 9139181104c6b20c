#include "equipart/known_values.hpp"

namespace equipart {

namespace {

constexpr int kMaxTabulatedQ = 3;

const char* const kHamSandwich = "classical: Ham Sandwich theorem";
const char* const kMvz =
    "Mani-Levitska, Vrecica, Zivaljevic 2007 (Z2^k-equivariant upper bound)";
const char* const kBfhz =
    "Blagojevic, Frick, Haase, Ziegler (join-scheme obstruction theory)";
const char* const kBfhzReduction =
    "Blagojevic, Frick, Haase, Ziegler (reduction Delta(m;k+1) <= "
    "Delta(2m;k))";
const char* const kHadwiger = "Hadwiger 1966";
const char* const kRestriction =
    "restriction of a Delta(m+1;k) equivariant bound to full orthogonality";
const char* const kCriterionCascade =
    "GF(2) top-class criterion: cascade family with affine containment";
const char* const kCriterionOrtho =
    "GF(2) top-class criterion: cascade family with full orthogonality";
const char* const kCriterionStar =
    "GF(2) top-class criterion: orthogonality to the last hyperplane";
const char* const kCriterionNear =
    "GF(2) top-class criterion: orthogonality on all pairs except (1,2)";
const char* const kCriterionMakeev =
    "GF(2) top-class criterion with a Makeev-type two-of-three condition";
const char* const kDomination =
    "implied by a dominating certified instance; lower bound by counting";

std::int64_t p2(int e) { return std::int64_t{1} << e; }

std::vector<int> pad(std::vector<int> m, int k) {
  m.resize(k, 0);
  return m;
}

ConstraintProblem pure(int k, std::vector<int> m) {
  return ConstraintProblem(k, pad(std::move(m), k));
}

ConstraintProblem perp(int k, std::vector<int> m) {
  return ConstraintProblem(k, pad(std::move(m), k), {},
                           ortho_set(OrthoUniverse::kAllPairs, k));
}

ConstraintProblem star(int k, std::vector<int> m) {
  return ConstraintProblem(k, pad(std::move(m), k), {},
                           ortho_set(OrthoUniverse::kStarLast, k));
}

ConstraintProblem with_pairs(int k, std::vector<int> m,
                             std::vector<OrthoPair> pairs) {
  return ConstraintProblem(k, pad(std::move(m), k), {}, std::move(pairs));
}

std::string statement(const ConstraintProblem& p, int lower, int upper) {
  std::string s = "Delta[" + p.describe() + "]";
  if (lower == upper) return s + " = " + std::to_string(lower);
  return s + " in [" + std::to_string(lower) + "," + std::to_string(upper) +
         "]";
}

std::vector<KnownValue> build_table() {
  std::vector<KnownValue> t;
  auto add = [&t](std::string id, ConstraintProblem p, std::int64_t lower,
                  std::int64_t upper, const char* citation) {
    const int lo = static_cast<int>(lower);
    const int hi = static_cast<int>(upper);
    auto text = statement(p, lo, hi);
    t.push_back({std::move(id), std::move(text), std::move(p), lo, hi,
                 citation});
  };

  for (int m = 1; m <= 8; ++m) {
    add("ham-sandwich/m=" + std::to_string(m), pure(1, {m}), m, m,
        kHamSandwich);
  }

  add("k3/m=1", pure(3, {1}), 3, 3, kHadwiger);
  add("k3/m=2", pure(3, {2}), 5, 5, kBfhz);
  add("k3/m=4", pure(3, {4}), 10, 10, kBfhz);
  add("k4/m=1", pure(4, {1}), 4, 5, kBfhzReduction);
  add("k4/m=2", pure(4, {2}), 8, 10, kBfhzReduction);

  for (int q = 0; q <= kMaxTabulatedQ; ++q) {
    const std::string qs = "/q=" + std::to_string(q);
    const int a = static_cast<int>(p2(q + 1));
    add("k2/m=2^(q+1)-1" + qs, pure(2, {a - 1}), 3 * p2(q) - 1, 3 * p2(q) - 1,
        kMvz);
    add("k2/m=2^(q+1)" + qs, pure(2, {a}), 3 * p2(q), 3 * p2(q), kBfhz);
    add("k2/m=2^(q+1)+1" + qs, pure(2, {a + 1}), 3 * p2(q) + 2, 3 * p2(q) + 2,
        kBfhz);

    add("perp-k2/m=2^(q+1)" + qs, perp(2, {a}), 3 * p2(q) + 1, 3 * p2(q) + 1,
        kRestriction);
    add("perp-k2/m=2^(q+1)-1" + qs, perp(2, {a - 1}), 3 * p2(q) - 1,
        3 * p2(q) - 1, kRestriction);
    add("cascade-k2/m=(2^(q+1)-1,1)" + qs, pure(2, {a - 1, 1}), 3 * p2(q) - 1,
        3 * p2(q) - 1, kCriterionCascade);

    const int b = static_cast<int>(p2(q + 2)) - 2;
    const auto vb = 3 * p2(q + 1) - 2;
    add("cascade-k2/m=(2^(q+2)-2,2)" + qs, pure(2, {b, 2}), vb, vb,
        kCriterionCascade);
    add("perp-cascade-k2/m=(2^(q+2)-2,1)" + qs, perp(2, {b, 1}), vb, vb,
        kCriterionOrtho);
    add("perp-k2/m=2^(q+2)-2" + qs, perp(2, {b}), vb, vb, kRestriction);

    const int c = static_cast<int>(p2(q + 3)) - 3;
    const auto vc = 3 * p2(q + 2) - 3;
    add("perp-cascade-k2/m=(2^(q+3)-3,2)" + qs, perp(2, {c, 2}), vc, vc,
        kCriterionOrtho);
  }

  add("cascade-k3/m=(1,1,2)", pure(3, {1, 1, 2}), 4, 4, kCriterionCascade);
  add("cascade-k3/m=(1,1,0)", pure(3, {1, 1, 0}), 4, 4, kDomination);
  add("pair23-k3/m=(1,1,1)", with_pairs(3, {1, 1, 1}, {{1, 2}}), 4, 4,
      kCriterionStar);
  add("star-k3/m=(1,1,0)", star(3, {1, 1, 0}), 4, 4, kCriterionStar);
  add("perp-k3/m=1", perp(3, {1}), 4, 4, kRestriction);

  add("perp-cascade-k3/m=(2,1,2)", perp(3, {2, 1, 2}), 8, 8, kCriterionOrtho);
  add("star-k3/m=(2,2,2)", star(3, {2, 2, 2}), 8, 8, kCriterionStar);

  add("perp-k3/m=3", perp(3, {3}), 8, 9, kRestriction);
  add("star-k3/m=(3,1,1)", star(3, {3, 1, 1}), 9, 9, kCriterionStar);
  add("cascade-k3/m=(3,1,1)", pure(3, {3, 1, 1}), 9, 9, kDomination);
  add("pair23-k3/m=(3,1,2)", with_pairs(3, {3, 1, 2}, {{1, 2}}), 9, 9,
      kCriterionStar);

  add("pair23-k3/m=(7,1,2)", with_pairs(3, {7, 1, 2}, {{1, 2}}), 18, 19,
      kCriterionStar);
  add("star-k3/m=(7,1,1)", star(3, {7, 1, 1}), 18, 19, kCriterionStar);
  add("perp-cascade-k3/m=(6,1,2)", perp(3, {6, 1, 2}), 17, 18,
      kCriterionOrtho);
  add("star-k3/m=(6,2,2)", star(3, {6, 2, 2}), 18, 18, kCriterionStar);

  add("perp-k4/m=1", perp(4, {1}), 6, 8, kCriterionMakeev);
  add("star-k4/m=(1,1,2,1)", star(4, {1, 1, 2, 1}), 8, 8, kCriterionStar);
  add("pair24-34-k4/m=(1,1,2,2)", with_pairs(4, {1, 1, 2, 2}, {{1, 3}, {2, 3}}),
      8, 8, kCriterionStar);
  add("cascade-k4/m=(1,1,2,2)", pure(4, {1, 1, 2, 2}), 8, 8,
      kCriterionCascade);
  add("near-perp-k4/m=(3,1,1,2)",
      ConstraintProblem(4, {3, 1, 1, 2}, {},
                        ortho_set(OrthoUniverse::kAllButFirstPair, 4)),
      16, 17, kCriterionNear);
  return t;
}

}  // namespace

nlohmann::json KnownValue::to_json() const {
  return {{"id", id},         {"statement", statement},
          {"problem", problem.to_json()},
          {"lower", lower},   {"upper", upper},
          {"exact", exact()}, {"citation", citation}};
}

const std::vector<KnownValue>& known_value_table() {
  static const std::vector<KnownValue> table = build_table();
  return table;
}

std::vector<const KnownValue*> lookup_known(const ConstraintProblem& p) {
  std::vector<const KnownValue*> hits;
  for (const auto& entry : known_value_table()) {
    if (entry.problem == p) hits.push_back(&entry);
  }
  return hits;
}

}  // namespace equipart
