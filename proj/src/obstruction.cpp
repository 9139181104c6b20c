#include "equipart/obstruction.hpp"

#include <algorithm>
#include <numeric>

#include "equipart/errors.hpp"

namespace equipart {

namespace {

constexpr const char* kRelaxedLabel =
    "extension: nonvanishing top Stiefel-Whitney class of a D-dimensional "
    "bundle";

// Sum over all bijections of `vars` onto `exponents` of the corresponding
// monomial, built by direct insertion.
TruncatedPolynomial permutation_sum(const RingShape& shape,
                                    std::vector<int> vars,
                                    const std::vector<int>& exponents) {
  auto out = TruncatedPolynomial::zero(shape);
  std::sort(vars.begin(), vars.end());
  do {
    Exponents e(shape.k(), 0);
    for (std::size_t pos = 0; pos < vars.size(); ++pos) {
      e[vars[pos]] = exponents[pos];
    }
    out += TruncatedPolynomial::monomial(shape, e);
  } while (std::next_permutation(vars.begin(), vars.end()));
  return out;
}

std::vector<int> var_range(int first, int k) {
  std::vector<int> v(k - first);
  std::iota(v.begin(), v.end(), first);
  return v;
}

void require_domain(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::kDomain, what);
}

}  // namespace

std::string_view to_string(CheckMode mode) {
  return mode == CheckMode::kStrict ? "strict" : "relaxed";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kCertified ? "certified" : "inconclusive";
}

CheckMode parse_check_mode(std::string_view text) {
  if (text == "strict") return CheckMode::kStrict;
  if (text == "relaxed") return CheckMode::kRelaxed;
  throw Error(ErrorKind::kUsage,
              "unknown mode '" + std::string(text) + "' (strict|relaxed)");
}

nlohmann::json Certificate::to_json() const {
  nlohmann::json doc{{"problem", problem.to_json()},
                     {"d", d},
                     {"mode", to_string(mode)},
                     {"D", form_count},
                     {"kd", kd},
                     {"verdict", to_string(verdict)},
                     {"h_is_top", h_is_top},
                     {"h_is_zero", h_is_zero},
                     {"h_digest", h_digest},
                     {"tight", tight}};
  doc["derivation"] = derivation ? nlohmann::json(*derivation) : nullptr;
  if (mode == CheckMode::kRelaxed) doc["mode_note"] = kRelaxedLabel;
  if (polynomial) doc["h"] = polynomial->to_json();
  return doc;
}

Certificate Certificate::from_json(const nlohmann::json& doc) {
  try {
    Certificate c{ConstraintProblem::from_json(doc.at("problem"))};
    c.d = doc.at("d").get<int>();
    c.mode = parse_check_mode(doc.at("mode").get<std::string>());
    c.form_count = doc.at("D").get<std::int64_t>();
    c.kd = doc.at("kd").get<std::int64_t>();
    const auto verdict = doc.at("verdict").get<std::string>();
    if (verdict != "certified" && verdict != "inconclusive") {
      throw Error(ErrorKind::kConfig, "unknown verdict '" + verdict + "'");
    }
    c.verdict =
        verdict == "certified" ? Verdict::kCertified : Verdict::kInconclusive;
    c.h_is_top = doc.at("h_is_top").get<bool>();
    c.h_is_zero = doc.at("h_is_zero").get<bool>();
    c.h_digest = doc.at("h_digest").get<std::string>();
    c.tight = doc.at("tight").get<bool>();
    if (doc.contains("derivation") && !doc.at("derivation").is_null()) {
      c.derivation = doc.at("derivation").get<std::string>();
    }
    if (doc.contains("h")) {
      c.polynomial = TruncatedPolynomial::from_json(doc.at("h"));
    }
    return c;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kConfig,
                std::string("malformed certificate JSON: ") + ex.what());
  }
}

Certificate check(const ConstraintProblem& p, int d, CheckMode mode,
                  bool keep_polynomial) {
  require_domain(d >= 1, "check needs d >= 1");
  const std::int64_t count = constraint_dimension(p);
  const std::int64_t kd = static_cast<std::int64_t>(p.k()) * d;
  if (count > kd) {
    throw Error(ErrorKind::kInfeasibleByCounting,
                "D=" + std::to_string(count) + " exceeds kd=" +
                    std::to_string(kd) + " for " + p.describe() +
                    "; no arrangement exists in dimension " +
                    std::to_string(d));
  }
  if (mode == CheckMode::kStrict && count != kd) {
    throw Error(ErrorKind::kDimensionMismatch,
                "strict mode needs D = kd, got D=" + std::to_string(count) +
                    " kd=" + std::to_string(kd));
  }

  const RingShape shape(p.k(), d);
  const auto forms = compile_forms(p);
  auto h = product_of_forms(shape, forms);

  Certificate c{p};
  c.d = d;
  c.mode = mode;
  c.form_count = count;
  c.kd = kd;
  c.h_is_top = h.is_top();
  c.h_is_zero = h.is_zero();
  c.h_digest = h.digest();
  c.tight = count == kd;
  const bool ok = mode == CheckMode::kStrict ? c.h_is_top : !c.h_is_zero;
  c.verdict = ok ? Verdict::kCertified : Verdict::kInconclusive;
  if (keep_polynomial) c.polynomial = std::move(h);
  return c;
}

std::optional<Certificate> find_min_certified_d(const ConstraintProblem& p,
                                                int d_max, CheckMode mode) {
  const std::int64_t count = constraint_dimension(p);
  const std::int64_t lo = std::max<std::int64_t>(1, lower_bound_dim(p));
  if (mode == CheckMode::kStrict) {
    if (count % p.k() != 0 || count == 0) return std::nullopt;
    const std::int64_t d = count / p.k();
    if (d > d_max) return std::nullopt;
    auto c = check(p, static_cast<int>(d), mode);
    if (c.certified()) return c;
    return std::nullopt;
  }
  for (std::int64_t d = lo; d <= d_max; ++d) {
    auto c = check(p, static_cast<int>(d), mode);
    if (c.certified()) return c;
  }
  return std::nullopt;
}

Certificate derive_by_domination(const ConstraintProblem& weaker,
                                 const Certificate& source) {
  if (!source.certified()) {
    throw Error(ErrorKind::kDomain,
                "domination transfer needs a certified source");
  }
  if (!dominates(weaker, source.problem)) {
    throw Error(ErrorKind::kDomain, weaker.describe() +
                                        " is not dominated by " +
                                        source.problem.describe());
  }
  Certificate c = source;
  c.problem = weaker;
  c.form_count = constraint_dimension(weaker);
  c.tight = false;
  c.polynomial.reset();
  c.derivation = "implied by domination from " + source.problem.describe() +
                 " at d=" + std::to_string(source.d);
  return c;
}

bool verify_vandermonde(int k, int j, int d) {
  require_domain(k >= 2 && j >= 1 && j <= k - 1,
                 "vandermonde identity needs 1 <= j <= k-1");
  require_domain(d >= k - j, "vandermonde identity needs d >= k-j");
  const RingShape shape(k, d);
  auto lhs = TruncatedPolynomial::one(shape);
  for (int r = j - 1; r < k; ++r) {
    for (int s = r + 1; s < k; ++s) {
      lhs = mul_linear(lhs, SignVector::pair(k, r, s));
    }
  }
  std::vector<int> exps;
  for (int e = k - j; e >= 0; --e) exps.push_back(e);
  return lhs == permutation_sum(shape, var_range(j - 1, k), exps);
}

bool verify_dickson(int k, int i, int d) {
  require_domain(k >= 1 && i >= 1 && i <= k,
                 "dickson identity needs 1 <= i <= k");
  require_domain(d >= (1 << (k - i)), "dickson identity needs d >= 2^(k-i)");
  const RingShape shape(k, d);
  auto lhs = TruncatedPolynomial::one(shape);
  const std::uint32_t step = std::uint32_t{1} << (i - 1);
  for (std::uint64_t mask = step; mask < (std::uint64_t{1} << k);
       mask += step) {
    lhs = mul_linear(lhs, SignVector(k, static_cast<std::uint32_t>(mask)));
  }
  std::vector<int> exps;
  for (int e = k - i; e >= 0; --e) exps.push_back(1 << e);
  return lhs == permutation_sum(shape, var_range(i - 1, k), exps);
}

bool verify_pki_ortho(int k, int i, int d) {
  require_domain(k >= 1 && i >= 1 && i <= k,
                 "orthogonal cascade identity needs 1 <= i <= k");
  require_domain(d >= k - 1, "orthogonal cascade identity needs d >= k-1");
  const RingShape shape(k, d);
  auto lhs = TruncatedPolynomial::one(shape);
  for (int r = i - 1; r < k; ++r) {
    for (int copy = 0; copy < i - 1; ++copy) {
      lhs = mul_linear(lhs, SignVector::basis(k, r));
    }
  }
  for (int r = i - 1; r < k; ++r) {
    for (int s = r + 1; s < k; ++s) {
      lhs = mul_linear(lhs, SignVector::pair(k, r, s));
    }
  }
  std::vector<int> exps;
  for (int e = k - 1; e >= i - 1; --e) exps.push_back(e);
  return lhs == permutation_sum(shape, var_range(i - 1, k), exps);
}

}  // namespace equipart
