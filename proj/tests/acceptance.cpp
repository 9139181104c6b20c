// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "brute_atlas.hpp"
#include "equipart/atlas.hpp"
#include "equipart/errors.hpp"
#include "equipart/masscut.hpp"
#include "equipart/obstruction.hpp"

using namespace equipart;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Each criterion appends human-readable notes and returns pass/fail.
struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::ostringstream&)> body;
};

std::vector<OrthoPair> star(int k) { return ortho_set(OrthoUniverse::kStarLast, k); }
std::vector<OrthoPair> all_pairs(int k) { return ortho_set(OrthoUniverse::kAllPairs, k); }

ConstraintProblem four_hyperplane_instance(std::vector<SignVector> extra = {}) {
  if (extra.empty()) {
    for (std::uint32_t mask : {2u, 4u, 8u, 6u, 10u, 12u}) extra.emplace_back(4, mask);
  }
  return ConstraintProblem(4, {1, 0, 0, 0}, {0, 0, 2, 3}, all_pairs(4), extra);
}

bool strict_suite(std::ostringstream& note) {
  struct Case {
    ConstraintProblem p;
    int d;
  };
  std::vector<Case> cases{{ConstraintProblem(2, {1, 1}), 2}};
  for (int q = 0; q <= 3; ++q) {
    cases.push_back({ConstraintProblem(2, {(2 << q) - 1, 1}), 3 * (1 << q) - 1});
    cases.push_back({ConstraintProblem(2, {(4 << q) - 2, 2}), 3 * (2 << q) - 2});
  }
  cases.push_back({ConstraintProblem(2, {5, 2}, {}, {{0, 1}}), 9});
  cases.push_back({ConstraintProblem(3, {1, 1, 2}), 4});
  cases.push_back({ConstraintProblem(3, {1, 1, 1}, {}, {{1, 2}}), 4});
  cases.push_back({ConstraintProblem(3, {1, 1, 0}, {}, star(3)), 4});
  cases.push_back({ConstraintProblem(3, {3, 1, 1}, {}, star(3)), 9});
  cases.push_back({ConstraintProblem(3, {2, 1, 4}, {}, all_pairs(3)), 8});
  cases.push_back({ConstraintProblem(3, {2, 2, 2}, {}, star(3)), 8});
  cases.push_back({ConstraintProblem(4, {1, 1, 2, 1}, {}, star(4)), 8});
  cases.push_back({ConstraintProblem(4, {1, 1, 2, 2}, {}, {{1, 3}, {2, 3}}), 8});
  cases.push_back({four_hyperplane_instance(), 8});

  bool ok = true;
  double slowest = 0;
  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const auto cert = check(c.p, c.d, CheckMode::kStrict);
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    const bool good = cert.certified() && cert.form_count == cert.kd && dt < 1.0;
    if (!good) note << " failed: " << c.p.describe() << " d=" << c.d << ";";
    ok = ok && good;
  }
  note << " " << cases.size() << " instances, slowest " << slowest << " s";
  return ok;
}

bool negative_controls(std::ostringstream& note) {
  bool ok = true;
  const auto a = check(ConstraintProblem(3, {3, 0, 0}, {}, all_pairs(3)), 9, CheckMode::kRelaxed);
  ok = ok && a.h_is_zero && !a.certified();
  const auto b = check(ConstraintProblem(3, {1, 0, 0}, {}, all_pairs(3)), 4, CheckMode::kRelaxed);
  ok = ok && b.h_is_zero && !b.certified();

  // Pure form: D = 4 = kd and h is not the top monomial.
  const ConstraintProblem pure(2, {1, 0}, {}, {{0, 1}});
  const auto strict = check(pure, 2, CheckMode::kStrict);
  const auto relaxed = check(pure, 2, CheckMode::kRelaxed);
  ok = ok && !strict.h_is_top && relaxed.h_is_zero;
  // Padded variant: the containment constraint in place of orthogonality.
  const auto padded = check(ConstraintProblem(2, {1, 0}, {0, 1}), 2, CheckMode::kStrict);
  ok = ok && padded.certified();
  // Both constraints together overshoot the dimension count.
  bool counted = false;
  try {
    check(ConstraintProblem(2, {1, 0}, {0, 1}, {{0, 1}}), 2, CheckMode::kStrict);
  } catch (const Error& e) {
    counted = e.kind() == ErrorKind::kInfeasibleByCounting;
  }
  ok = ok && counted;
  note << " pure form h=0: " << relaxed.h_is_zero << ", padded a=(0,1) certifies: "
       << padded.certified() << ", a=(0,1) with ortho rejected by counting: " << counted;
  return ok;
}

bool classification_suite(std::ostringstream& note) {
  const auto a = classify(ConstraintProblem(2, {1, 1}), 2);
  const auto b = classify(ConstraintProblem(2, {5, 2}, {}, {{0, 1}}), 9);
  const auto c = classify(ConstraintProblem(3, {2, 2, 2}, {}, star(3)), 8);
  const ConstraintProblem d(4, {3, 1, 1, 2}, {}, ortho_set(OrthoUniverse::kAllButFirstPair, 4));
  const bool ok_a = a.optimal == std::optional<bool>(true) && a.maximal && a.tight;
  const bool ok_b = b.maximal && b.optimal == std::optional<bool>(false);
  const bool ok_c = c.balanced && std::count(c.maximal_stages.begin(), c.maximal_stages.end(), 2) == 1;
  const bool ok_d = lower_bound_dim(d) == 16;
  note << " labels " << ok_a << ok_b << ok_c << ", lower bound " << lower_bound_dim(d);
  return ok_a && ok_b && ok_c && ok_d;
}

bool identity_suite(std::ostringstream& note) {
  const auto t0 = Clock::now();
  bool ok = true;
  int runs = 0;
  for (int k = 2; k <= 5; ++k) {
    for (int j = 1; j < k; ++j, ++runs) ok = verify_vandermonde(k, j, k) && ok;
  }
  for (int k = 1; k <= 4; ++k) {
    for (int i = 1; i <= k; ++i, ++runs) ok = verify_dickson(k, i, (1 << (k - i)) + 1) && ok;
  }
  for (int k = 1; k <= 4; ++k) {
    for (int i = 1; i <= k; ++i, ++runs) ok = verify_pki_ortho(k, i, k) && ok;
  }
  const double dt = seconds_since(t0);
  note << " " << runs << " identities in " << dt << " s";
  return ok && dt < 10.0;
}

bool family_suite(std::ostringstream& note) {
  std::vector<std::function<FamilyInstance(int, int, int)>> plain{
      [](int q, int t, int k) { return family_cascade(q, t, {}, k); },
      [](int q, int t, int k) { return family_ortho_cascade(q, t, {}, k); },
      [](int q, int t, int k) { return family_near_ortho(q, t, k); },
      [](int q, int, int k) { return family_ham_sandwich_cascade(q, k); },
  };
  // Star-ortho over every subset of the star pairs.
  for (unsigned bits = 1; bits < 8; ++bits) {
    plain.push_back([bits](int q, int t, int k) {
      std::vector<OrthoPair> pairs;
      for (int r = 0; r < k - 1; ++r) {
        if ((bits >> r) & 1u) pairs.emplace_back(r, k - 1);
      }
      return family_star_ortho(q, t, k, pairs);
    });
  }
  std::vector<int> per_generator(5, 0);
  bool ok = true;
  for (std::size_t g = 0; g < plain.size(); ++g) {
    for (int q = 0; q <= 2; ++q) {
      for (int t = 1; t <= (1 << q); ++t) {
        for (int k = 1; k <= 4; ++k) {
          std::optional<FamilyInstance> inst;
          try {
            inst = plain[g](q, t, k);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::kFamilyDomain) throw;
            continue;
          }
          const bool good = constraint_dimension(inst->problem) ==
                                static_cast<std::int64_t>(k) * inst->d &&
                            check(inst->problem, inst->d, CheckMode::kStrict).certified();
          if (!good) note << " failed: " << inst->family << " " << inst->problem.describe() << ";";
          ok = ok && good;
          ++per_generator[std::min<std::size_t>(g, 4)];
        }
      }
    }
  }
  for (int n : per_generator) ok = ok && n > 0;
  note << " instances per generator:";
  for (int n : per_generator) note << " " << n;
  return ok;
}

bool counting_suite(std::ostringstream& note) {
  bool ok = true;
  int checked = 0;
  for (int k = 1; k <= 6; ++k) {
    for (std::int64_t m = 1; m <= 64; ++m, ++checked) {
      const int q = static_cast<int>(std::floor(std::log2(static_cast<double>(m))));
      const std::int64_t t = (std::int64_t{2} << q) - m;
      const std::int64_t alt = (std::int64_t{1} << q) * ((std::int64_t{1} << (k - 1)) + 1) - t;
      ok = ok && t >= 1 && t <= (std::int64_t{1} << q) && upper_U(m, k) == alt;
      const bool equal = upper_U(m, k) == ramos_L(m, k);
      const bool predicted = k == 1 || (k == 2 && m == (std::int64_t{2} << q) - 1);
      ok = ok && equal == predicted;
    }
  }
  note << " " << checked << " (m,k) pairs";
  return ok;
}

bool atlas_suite(std::ostringstream& note) {
  const auto t0 = Clock::now();
  AtlasQuery q;
  q.k = 2;
  q.d_min = 2;
  q.d_max = 4;
  q.max_m = 7;
  q.max_a = 4;
  q.universe = AtlasUniverse::kAllPairs;
  q.full_ortho_subsets = true;
  const auto rows = enumerate(q);
  std::vector<oracle::BruteRow> got;
  for (const auto& r : rows) got.push_back({r.d, r.problem.m(), r.problem.a(), r.problem.ortho()});
  const auto brute = oracle::brute_atlas(2, 2, 4, 7, 4);
  const double dt = seconds_since(t0);
  note << " atlas " << got.size() << " rows, brute force " << brute.size() << " rows, " << dt << " s";
  return got == brute && !got.empty() && dt < 60.0;
}

MassSpec spec(const char* text) { return MassSpec::from_json(nlohmann::json::parse(text), 0); }

bool solver_suite(std::ostringstream& note) {
  bool ok = true;
  const SolverConfig cfg;

  const auto a = spec(R"({"d":2,"problem":{"k":1,"m":[2]},
    "masses":[{"label":"1.1","mixture":[{"mean":[0,0],"cov":"I","weight":1}],"N":100000},
              {"label":"1.2","mixture":[{"mean":[4,-1],"cov":2,"weight":1}],"N":100000}]})");
  const auto wa = solve(*a.problem, a.masses, a.points, cfg);
  const bool ok_a = wa.success && wa.max_equipartition() < 5e-3;
  note << " (a) max residual " << wa.max_equipartition() << ";";

  const auto b = spec(R"({"d":2,"problem":{"k":2,"m":[1,1]},
    "masses":[{"label":"1.1","mixture":[{"mean":[0,0],"cov":"I","weight":1}],"N":100000},
              {"label":"2.1","mixture":[{"mean":[3,1],"cov":[[1,0.3],[0.3,0.5]],"weight":1}],"N":100000}]})");
  const auto t0 = Clock::now();
  const auto wb = solve(*b.problem, b.masses, b.points, cfg);
  const double dt = seconds_since(t0);
  const bool ok_b = wb.success && wb.objective < 1e-4 && wb.diagnostics.starts <= 32 && dt < 60.0;
  note << " (b) objective " << wb.objective << " in " << dt << " s;";

  // The orthogonal pair plus a containment point at the mass mean.
  const auto c = spec(R"({"d":2,"problem":{"k":2,"m":[1,0],"a":[0,1],"ortho":[[1,2]]},
    "masses":[{"label":"1.1","mixture":[{"mean":[1,2],"cov":"I","weight":1}],"N":100000}],
    "points":[{"hyperplane":2,"coords":[1,2]}]})");
  const auto wc = solve(*c.problem, c.masses, c.points, cfg);
  const bool ok_c = wc.success && wc.max_orthogonality() < 1e-6 && wc.max_containment() < 1e-9;
  note << " (c) ortho " << wc.max_orthogonality() << " containment " << wc.max_containment() << ";";

  const bool ok_d = solve(*a.problem, a.masses, a.points, cfg).to_json().dump() == wa.to_json().dump();
  note << " (d) identical witness: " << ok_d;
  ok = ok_a && ok_b && ok_c && ok_d;
  return ok;
}

bool digest_suite(std::ostringstream& note) {
  const auto base = four_hyperplane_instance();
  const auto reference = check(base, 8, CheckMode::kStrict);
  std::mt19937 rng(2024);
  bool ok = reference.certified();
  auto forms = compile_forms(base);
  std::vector<SignVector> extra = base.extra();
  for (int run = 0; run < 10; ++run) {
    std::shuffle(forms.begin(), forms.end(), rng);
    std::shuffle(extra.begin(), extra.end(), rng);
    const auto h = product_of_forms(RingShape(4, 8), forms);
    auto pairs = all_pairs(4);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const ConstraintProblem listed(4, {1, 0, 0, 0}, {0, 0, 2, 3}, pairs, extra);
    ok = ok && h.digest() == reference.h_digest &&
         check(listed, 8, CheckMode::kStrict).h_digest == reference.h_digest;
  }
  note << " digest " << reference.h_digest.substr(0, 16) << "...";
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "strict certification suite", strict_suite},
      {2, "negative controls", negative_controls},
      {3, "classification labels", classification_suite},
      {4, "polynomial identities", identity_suite},
      {5, "family generators certify", family_suite},
      {6, "counting bounds cross-check", counting_suite},
      {7, "atlas completeness against brute force", atlas_suite},
      {8, "numerical solver", solver_suite},
      {9, "certificate digest determinism", digest_suite},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    std::ostringstream note;
    bool ok = false;
    try {
      ok = c.body(note);
    } catch (const std::exception& e) {
      note << " exception: " << e.what();
    }
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << ":" << note.str()
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
