#include "equipart/constraint_model.hpp"

#include <algorithm>
#include <sstream>

#include "equipart/errors.hpp"

namespace equipart {

namespace {

constexpr int kMaxFamilyQ = 24;

std::int64_t pow2(int e) { return std::int64_t{1} << e; }

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return (num + den - 1) / den;
}

// Characters of the stage-`stage` cascade (0-based): every nonzero vector
// supported on coordinates stage..k-1.
std::int64_t stage_weight(int k, int stage) { return pow2(k - stage) - 1; }

void family_require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kFamilyDomain, what);
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

FamilyInstance finish_family(std::string family, ConstraintProblem problem,
                             std::int64_t d, std::string note = {}) {
  const auto c = constraint_dimension(problem);
  if (c != problem.k() * d) {
    throw Error(ErrorKind::kInternalConsistency,
                family + " generated " + problem.describe() + " with C=" +
                    std::to_string(c) + " != kd=" +
                    std::to_string(problem.k() * d));
  }
  return {std::move(family), std::move(problem), static_cast<int>(d),
          std::move(note)};
}

std::vector<int> zeros_if_empty(std::vector<int> a, int k) {
  if (a.empty()) a.assign(k, 0);
  family_require(static_cast<int>(a.size()) == k,
                 "a must have length k=" + std::to_string(k));
  return a;
}

void check_common(int q, int t, int k) {
  family_require(q >= 0 && q <= kMaxFamilyQ, "q must be in 0..24");
  family_require(k >= 1 && k <= 30, "k must be in 1..30");
  family_require(t <= pow2(q), "t must satisfy t <= 2^q");
}

}  // namespace

ConstraintProblem::ConstraintProblem(int k, std::vector<int> m,
                                     std::vector<int> a,
                                     std::vector<OrthoPair> ortho,
                                     std::vector<SignVector> extra)
    : k_(k),
      m_(std::move(m)),
      a_(std::move(a)),
      ortho_(std::move(ortho)),
      extra_(std::move(extra)) {
  if (k_ < 1 || k_ > SignVector::kMaxK) {
    throw Error(ErrorKind::kDomain,
                "k must be in 1..32, got " + std::to_string(k_));
  }
  if (a_.empty()) a_.assign(k_, 0);
  if (static_cast<int>(m_.size()) != k_ || static_cast<int>(a_.size()) != k_) {
    throw Error(ErrorKind::kShape, "m and a must have length k=" +
                                       std::to_string(k_));
  }
  for (int v : m_) {
    if (v < 0) throw Error(ErrorKind::kDomain, "m entries must be >= 0");
  }
  for (int v : a_) {
    if (v < 0) throw Error(ErrorKind::kDomain, "a entries must be >= 0");
  }
  for (const auto& [r, s] : ortho_) {
    if (r < 0 || s >= k_ || r >= s) {
      throw Error(ErrorKind::kDomain,
                  "orthogonal pairs need 1 <= r < s <= k, got (" +
                      std::to_string(r + 1) + "," + std::to_string(s + 1) +
                      ")");
    }
  }
  std::sort(ortho_.begin(), ortho_.end());
  if (std::adjacent_find(ortho_.begin(), ortho_.end()) != ortho_.end()) {
    throw Error(ErrorKind::kDomain, "orthogonal pairs must be unique");
  }
  for (const auto& f : extra_) {
    if (f.k() != k_) {
      throw Error(ErrorKind::kShape,
                  "extra character length must equal k=" + std::to_string(k_));
    }
  }
  std::sort(extra_.begin(), extra_.end());
}

ConstraintProblem ConstraintProblem::with_m(std::vector<int> m) const {
  return ConstraintProblem(k_, std::move(m), a_, ortho_, extra_);
}

nlohmann::json ConstraintProblem::to_json() const {
  nlohmann::json ortho = nlohmann::json::array();
  for (const auto& [r, s] : ortho_) ortho.push_back({r + 1, s + 1});
  nlohmann::json extra = nlohmann::json::array();
  for (const auto& f : extra_) extra.push_back(f.bits());
  return {{"k", k_}, {"m", m_}, {"a", a_}, {"ortho", ortho}, {"extra", extra}};
}

ConstraintProblem ConstraintProblem::from_json(const nlohmann::json& doc) {
  try {
    const int k = doc.at("k").get<int>();
    if (k < 1 || k > SignVector::kMaxK) {
      throw Error(ErrorKind::kConfig, "problem k must be in 1..32");
    }
    auto padded = [&](const char* key) {
      std::vector<int> v;
      if (doc.contains(key)) v = doc.at(key).get<std::vector<int>>();
      if (static_cast<int>(v.size()) > k) {
        throw Error(ErrorKind::kConfig,
                    std::string("problem field '") + key + "' longer than k");
      }
      v.resize(k, 0);
      return v;
    };
    auto m = padded("m");
    auto a = padded("a");
    std::vector<OrthoPair> ortho;
    if (doc.contains("ortho")) {
      for (const auto& pr : doc.at("ortho")) {
        const auto v = pr.get<std::vector<int>>();
        if (v.size() != 2) {
          throw Error(ErrorKind::kConfig, "ortho entries must be [r,s]");
        }
        ortho.emplace_back(v[0] - 1, v[1] - 1);
      }
    }
    std::vector<SignVector> extra;
    if (doc.contains("extra")) {
      for (const auto& f : doc.at("extra")) {
        const auto bits = f.get<std::vector<int>>();
        extra.push_back(SignVector::from_bits(bits));
      }
    }
    return ConstraintProblem(k, std::move(m), std::move(a), std::move(ortho),
                             std::move(extra));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kConfig,
                std::string("malformed problem JSON: ") + ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorKind::kConfig, ex.what());
  }
}

std::string ConstraintProblem::describe() const {
  std::ostringstream os;
  os << "k=" << k_ << " m=" << join_ints(m_);
  if (std::any_of(a_.begin(), a_.end(), [](int v) { return v != 0; })) {
    os << " a=" << join_ints(a_);
  }
  if (!ortho_.empty()) {
    os << " ortho={";
    for (std::size_t i = 0; i < ortho_.size(); ++i) {
      os << (i ? "," : "") << '(' << ortho_[i].first + 1 << ','
         << ortho_[i].second + 1 << ')';
    }
    os << '}';
  }
  if (!extra_.empty()) {
    os << " extra={";
    for (std::size_t i = 0; i < extra_.size(); ++i) {
      os << (i ? "," : "");
      for (int b : extra_[i].bits()) os << b;
    }
    os << '}';
  }
  return os.str();
}

std::vector<OrthoPair> ortho_set(OrthoUniverse universe, int k) {
  std::vector<OrthoPair> out;
  for (int r = 0; r < k; ++r) {
    for (int s = r + 1; s < k; ++s) {
      switch (universe) {
        case OrthoUniverse::kAllPairs:
          out.emplace_back(r, s);
          break;
        case OrthoUniverse::kStarLast:
          if (s == k - 1) out.emplace_back(r, s);
          break;
        case OrthoUniverse::kAllButFirstPair:
          if (!(r == 0 && s == 1)) out.emplace_back(r, s);
          break;
      }
    }
  }
  return out;
}

std::int64_t constraint_dimension(const ConstraintProblem& p) {
  std::int64_t c = 0;
  for (int i = 0; i < p.k(); ++i) {
    c += p.m()[i] * stage_weight(p.k(), i) + p.a()[i];
  }
  return c + static_cast<std::int64_t>(p.ortho().size()) +
         static_cast<std::int64_t>(p.extra().size());
}

std::int64_t lower_bound_dim(const ConstraintProblem& p) {
  return ceil_div(constraint_dimension(p), p.k());
}

std::int64_t ramos_L(std::int64_t m, int k) {
  if (m < 1) throw Error(ErrorKind::kDomain, "L(m;k) needs m >= 1");
  if (k < 1 || k > 32) throw Error(ErrorKind::kDomain, "L(m;k) needs k >= 1");
  return ceil_div(m * (pow2(k) - 1), k);
}

std::int64_t upper_U(std::int64_t m, int k) {
  if (m < 1) throw Error(ErrorKind::kDomain, "U(m;k) needs m >= 1");
  if (k < 1 || k > 32) throw Error(ErrorKind::kDomain, "U(m;k) needs k >= 1");
  int q = 0;
  while (pow2(q + 1) <= m) ++q;
  const std::int64_t r = m - pow2(q);
  return pow2(q + k - 1) + r;
}

std::vector<SignVector> compile_forms(const ConstraintProblem& p) {
  const int k = p.k();
  std::vector<SignVector> forms;
  forms.reserve(static_cast<std::size_t>(constraint_dimension(p)));
  for (int i = 0; i < k; ++i) {
    // Nonzero masks over bits i..k-1 are exactly the multiples of 2^i.
    const std::uint32_t step = std::uint32_t{1} << i;
    const std::uint64_t end = std::uint64_t{1} << k;
    for (int copy = 0; copy < p.m()[i]; ++copy) {
      for (std::uint64_t mask = step; mask < end; mask += step) {
        forms.emplace_back(k, static_cast<std::uint32_t>(mask));
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int copy = 0; copy < p.a()[i]; ++copy) {
      forms.push_back(SignVector::basis(k, i));
    }
  }
  for (const auto& [r, s] : p.ortho()) forms.push_back(SignVector::pair(k, r, s));
  forms.insert(forms.end(), p.extra().begin(), p.extra().end());
  return forms;
}

nlohmann::json Classification::to_json() const {
  nlohmann::json doc{{"d", d},
                     {"lower_dim", lower_dim},
                     {"maximal_stages", maximal_stages},
                     {"j_maximal", j_maximal},
                     {"maximal", maximal},
                     {"balanced", balanced},
                     {"tight", tight}};
  doc["optimal"] = optimal ? nlohmann::json(*optimal) : nlohmann::json();
  return doc;
}

Classification classify(const ConstraintProblem& p, int d) {
  const int k = p.k();
  Classification out;
  out.d = d;
  out.lower_dim = lower_bound_dim(p);
  if (d < out.lower_dim) {
    throw Error(ErrorKind::kContradiction,
                "d=" + std::to_string(d) + " is below the counting bound " +
                    std::to_string(out.lower_dim) + " for " + p.describe());
  }
  const int m1 = p.m()[0];
  if (m1 >= 1) {
    out.optimal = ramos_L(m1, k) <= d && d < ramos_L(m1 + 1, k);
  }
  bool prefix = true;
  for (int i = 0; i < k; ++i) {
    std::vector<int> bumped(p.m().begin(), p.m().begin() + i + 1);
    bumped.resize(k, 0);
    bumped[i] += 1;
    const bool stage_max = d < lower_bound_dim(p.with_m(bumped));
    if (stage_max) out.maximal_stages.push_back(i + 1);
    prefix = prefix && stage_max;
    if (prefix) out.j_maximal = i + 1;
  }
  out.maximal = out.j_maximal == k;
  out.balanced = true;
  for (int i = 1; i < k; ++i) out.balanced = out.balanced && p.m()[i] <= 2;
  out.tight = constraint_dimension(p) == static_cast<std::int64_t>(k) * d;
  return out;
}

nlohmann::json FamilyInstance::to_json() const {
  nlohmann::json doc{{"family", family}, {"problem", problem.to_json()},
                     {"d", d}};
  doc["note"] = note.empty() ? nlohmann::json() : nlohmann::json(note);
  return doc;
}

FamilyInstance family_cascade(int q, int t, std::vector<int> a, int k) {
  check_common(q, t, k);
  family_require(t >= 1, "cascade family needs t >= 1");
  a = zeros_if_empty(std::move(a), k);
  family_require(std::is_sorted(a.begin(), a.end()),
                 "cascade family needs a_1 <= ... <= a_k");
  family_require(a[0] >= 0, "a entries must be >= 0");
  if (k >= 2) {
    family_require(a[1] <= 2 * a[0] + t, "cascade family needs a_2 <= 2a_1+t");
    family_require(a[k - 2] <= pow2(q) - t,
                   "cascade family needs a_{k-1} <= 2^q - t");
  }
  std::vector<int> m(k);
  m[0] = static_cast<int>(pow2(q + 1) - t - a[0]);
  for (int i = 1; i < k; ++i) {
    // 1-based stage i+1: 2^q (2^{i-1} - 1) + t + 2 a_i - a_{i+1}
    m[i] = static_cast<int>(pow2(q) * (pow2(i - 1) - 1) + t + 2 * a[i - 1] -
                            a[i]);
  }
  for (int v : m) {
    family_require(v >= 0, "cascade family generated a negative m entry " +
                               join_ints(m));
  }
  const std::int64_t d = pow2(q) * (pow2(k - 1) + 1) - t;
  return finish_family("cascade", ConstraintProblem(k, m, a), d);
}

FamilyInstance family_ortho_cascade(int q, int t, std::vector<int> a, int k) {
  check_common(q, t, k);
  family_require(t >= 2, "ortho-cascade family needs t >= 2");
  a = zeros_if_empty(std::move(a), k);
  family_require(std::is_sorted(a.begin(), a.end()),
                 "ortho-cascade family needs a_1 <= ... <= a_k");
  family_require(a[0] >= 0, "a entries must be >= 0");
  if (k >= 2) {
    family_require(a[1] <= 2 * a[0] + t - 1,
                   "ortho-cascade family needs a_2 <= 2a_1+t-1");
    family_require(a[k - 2] <= pow2(q) - t - k + 3,
                   "ortho-cascade family needs a_{k-1} <= 2^q-t-k+3");
  }
  std::vector<int> m(k);
  m[0] = static_cast<int>(pow2(q + 1) - t - a[0]);
  for (int i = 1; i < k; ++i) {
    const int stage = i + 1;  // 1-based
    m[i] = static_cast<int>(pow2(q) * (pow2(stage - 2) - 1) + t + stage - 3 +
                            2 * a[i - 1] - a[i]);
  }
  for (int v : m) {
    family_require(v >= 0, "ortho-cascade family generated a negative m entry " +
                               join_ints(m));
  }
  const std::int64_t d = pow2(q) * (pow2(k - 1) + 1) - t;
  return finish_family(
      "ortho-cascade",
      ConstraintProblem(k, m, a, ortho_set(OrthoUniverse::kAllPairs, k)), d);
}

FamilyInstance family_near_ortho(int q, int t, int k) {
  check_common(q, t, k);
  family_require(t >= 1, "near-ortho family needs t >= 1");
  family_require(k >= 3, "near-ortho family needs k >= 3");
  family_require(pow2(q) >= t + k - 3, "near-ortho family needs 2^q >= t+k-3");
  std::vector<int> m(k);
  m[0] = static_cast<int>(pow2(q + 1) - t);
  m[1] = t;
  m[2] = static_cast<int>(pow2(q) + t - 2);
  for (int i = 3; i < k; ++i) {
    const int stage = i + 1;
    m[i] = static_cast<int>(pow2(q) * (pow2(stage - 2) - 1) + t + stage - 3);
  }
  for (int v : m) {
    family_require(v >= 0, "near-ortho family generated a negative m entry " +
                               join_ints(m));
  }
  const std::int64_t d = pow2(q) * (pow2(k - 1) + 1) - t;
  return finish_family(
      "near-ortho",
      ConstraintProblem(k, m, {},
                        ortho_set(OrthoUniverse::kAllButFirstPair, k)),
      d);
}

FamilyInstance family_star_ortho(int q, int t, int k,
                                 const std::vector<OrthoPair>& ortho) {
  check_common(q, t, k);
  family_require(t >= 1, "star-ortho family needs t >= 1");
  family_require(k >= 3, "star-ortho family needs k >= 3");
  const int j = static_cast<int>(ortho.size());
  family_require(j >= 1 && j <= k - 1,
                 "star-ortho family needs 1 <= |ortho| <= k-1");
  for (const auto& [r, s] : ortho) {
    family_require(s == k - 1 && r >= 0 && r < k - 1,
                   "star-ortho family needs pairs of the form (r,k)");
  }
  std::vector<int> m(k);
  m[0] = static_cast<int>(pow2(q + 1) - t);
  for (int i = 1; i < k; ++i) {
    const int stage = i + 1;
    m[i] = static_cast<int>(pow2(q) * (pow2(stage - 2) - 1) + t);
  }
  m[k - 1] -= j;
  for (int v : m) {
    family_require(v >= 0, "star-ortho family generated a negative m entry " +
                               join_ints(m));
  }
  const std::int64_t d = pow2(q) * (pow2(k - 1) + 1) - t;
  return finish_family(
      "star-ortho", ConstraintProblem(k, m, {}, ortho), d,
      "m_1 generated as 2^(q+1)-t; the value 2^q-t does not give C = kd");
}

FamilyInstance family_ham_sandwich_cascade(int q, int k) {
  family_require(q >= 0 && q <= kMaxFamilyQ, "q must be in 0..24");
  auto inst = family_cascade(q, static_cast<int>(pow2(q)), {}, k);
  inst.family = "ham-sandwich";
  return inst;
}

bool dominates(const ConstraintProblem& weaker,
               const ConstraintProblem& stronger) {
  if (weaker.k() != stronger.k()) {
    throw Error(ErrorKind::kShape, "dominates needs equal k");
  }
  for (int i = 0; i < weaker.k(); ++i) {
    if (weaker.m()[i] > stronger.m()[i]) return false;
    if (weaker.a()[i] > stronger.a()[i]) return false;
  }
  // Both lists are kept sorted, so multiset inclusion is std::includes.
  return std::includes(stronger.ortho().begin(), stronger.ortho().end(),
                       weaker.ortho().begin(), weaker.ortho().end()) &&
         std::includes(stronger.extra().begin(), stronger.extra().end(),
                       weaker.extra().begin(), weaker.extra().end());
}

}  // namespace equipart
