#include "equipart/masscut.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "equipart/errors.hpp"

namespace equipart {

namespace {

constexpr double kTieBand = 1e-12;
constexpr double kInvalidPenalty = 1e3;

using Rows = Eigen::MatrixXd;  // k x (d+1), row l = (a_l, b_l)

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// --- layout -----------------------------------------------------------------

struct Layout {
  std::vector<int> order;      // mass indices sorted by (stage, j)
  std::vector<int> stage;      // 0-based stage per mass (input order)
  std::vector<int> per_plane;  // containment points per hyperplane
};

std::pair<int, int> parse_label(const std::string& label) {
  const auto dot = label.find('.');
  if (dot == std::string::npos) config_error("mass label '" + label + "' is not i.j");
  try {
    std::size_t used_i = 0;
    std::size_t used_j = 0;
    const int i = std::stoi(label.substr(0, dot), &used_i);
    const int j = std::stoi(label.substr(dot + 1), &used_j);
    if (used_i != dot || used_j != label.size() - dot - 1) throw std::invalid_argument("");
    return {i, j};
  } catch (const std::exception&) {
    config_error("mass label '" + label + "' is not i.j");
  }
}

Layout make_layout(const ConstraintProblem& problem,
                   const std::vector<SampledMass>& masses,
                   const std::vector<ContainmentPoint>& points, int d) {
  if (!problem.extra().empty()) {
    config_error("the solver does not support extra characters");
  }
  const int k = problem.k();
  Layout layout;
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t idx = 0; idx < masses.size(); ++idx) {
    const auto& mass = masses[idx];
    mass.validate();
    if (mass.dim() != d) {
      throw Error(ErrorKind::kShape, "mass " + mass.label + " has dimension " +
                                         std::to_string(mass.dim()) +
                                         ", expected " + std::to_string(d));
    }
    const auto [i, j] = parse_label(mass.label);
    if (i < 1 || i > k || j < 1 || j > problem.m()[i - 1]) {
      config_error("mass label " + mass.label + " does not match m");
    }
    if (!seen.emplace(std::make_pair(i, j), static_cast<int>(idx)).second) {
      config_error("duplicate mass label " + mass.label);
    }
    layout.stage.push_back(i - 1);
  }
  int expected = 0;
  for (int v : problem.m()) expected += v;
  if (static_cast<int>(seen.size()) != expected) {
    config_error("expected " + std::to_string(expected) + " masses for m, got " +
                 std::to_string(seen.size()));
  }
  for (const auto& [key, idx] : seen) layout.order.push_back(idx);

  layout.per_plane.assign(k, 0);
  for (const auto& p : points) {
    if (p.hyperplane < 0 || p.hyperplane >= k) {
      config_error("containment point names hyperplane " +
                   std::to_string(p.hyperplane + 1) + " outside 1..k");
    }
    if (p.coords.size() != d) {
      throw Error(ErrorKind::kShape, "containment point has wrong dimension");
    }
    ++layout.per_plane[p.hyperplane];
  }
  if (layout.per_plane != problem.a()) {
    config_error("containment point counts do not match a");
  }
  return layout;
}

// --- geometry kernels ---------------------------------------------------------

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Region masses of a point cloud cut by rows first..k-1 of X.
std::vector<double> cut(const Eigen::MatrixXd& pts, const Eigen::VectorXd& w,
                        const Rows& x, int first, EvaluationMode mode,
                        double tau) {
  const int k = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols()) - 1;
  const int r = k - first;
  const std::size_t regions = std::size_t{1} << r;
  std::vector<double> out(regions, 0.0);

  const Eigen::MatrixXd a = x.block(first, 0, r, d);
  const Eigen::VectorXd b = x.block(first, d, r, 1);
  Eigen::MatrixXd raw = pts * a.transpose();
  raw.rowwise() -= b.transpose();

  if (mode == EvaluationMode::kHard) {
    for (Eigen::Index n = 0; n < raw.rows(); ++n) {
      std::size_t idx = 0;
      std::size_t ties = 0;
      for (int j = 0; j < r; ++j) {
        const double s = raw(n, j);
        if (std::abs(s) < kTieBand) {
          ties |= std::size_t{1} << j;
        } else if (s < 0) {
          idx |= std::size_t{1} << j;
        }
      }
      if (ties == 0) {
        out[idx] += w[n];
        continue;
      }
      const double share = w[n] / static_cast<double>(std::size_t{1}
                                                      << std::popcount(ties));
      for (std::size_t sub = ties;; sub = (sub - 1) & ties) {
        out[idx | sub] += share;
        if (sub == 0) break;
      }
    }
    return out;
  }

  Eigen::VectorXd inv(r);
  for (int j = 0; j < r; ++j) inv[j] = 1.0 / (a.row(j).norm() * tau);
  std::vector<double> prob(regions);
  for (Eigen::Index n = 0; n < raw.rows(); ++n) {
    prob[0] = w[n];
    for (int j = 0; j < r; ++j) {
      const double p0 = logistic(raw(n, j) * inv[j]);
      const std::size_t half = std::size_t{1} << j;
      for (std::size_t g = 0; g < half; ++g) {
        prob[g | half] = prob[g] * (1.0 - p0);
        prob[g] *= p0;
      }
    }
    for (std::size_t g = 0; g < regions; ++g) out[g] += prob[g];
  }
  return out;
}

Rows to_rows(const std::vector<HyperplaneParam>& hs) {
  const int k = static_cast<int>(hs.size());
  const int d = static_cast<int>(hs.front().normal.size());
  Rows x(k, d + 1);
  for (int l = 0; l < k; ++l) {
    x.row(l).head(d) = hs[l].normal.transpose();
    x(l, d) = hs[l].offset;
  }
  return x;
}

std::vector<HyperplaneParam> from_rows(const Rows& x) {
  const int d = static_cast<int>(x.cols()) - 1;
  std::vector<HyperplaneParam> hs;
  for (Eigen::Index l = 0; l < x.rows(); ++l) {
    hs.push_back(HyperplaneParam::from_raw(x.row(l).head(d).transpose(), x(l, d)));
  }
  return hs;
}

void normalize_rows(Rows& x) {
  for (Eigen::Index l = 0; l < x.rows(); ++l) {
    const double n = x.row(l).norm();
    if (n > 0) {
      x.row(l) /= n;
    } else {
      x.row(l).setZero();
      x(l, 0) = 1.0;
    }
  }
}

struct Constraints {
  std::vector<OrthoPair> ortho;
  std::vector<std::pair<int, Eigen::VectorXd>> points;

  bool empty() const { return ortho.empty() && points.empty(); }
};

// Gauss-Newton minimum-norm steps onto {<a_r,a_s> = 0, <p,a_i> = b_i}.
// Every constraint is homogeneous in its rows, so rescaling rows to the
// sphere afterwards keeps it satisfied.
void project(Rows& x, const Constraints& c) {
  normalize_rows(x);
  if (c.empty()) return;
  const int k = static_cast<int>(x.rows());
  const int w = static_cast<int>(x.cols());
  const int d = w - 1;
  const int mc = static_cast<int>(c.ortho.size() + c.points.size());
  Eigen::VectorXd g(mc);
  Eigen::MatrixXd jac(mc, k * w);
  for (int iter = 0; iter < 50; ++iter) {
    jac.setZero();
    int row = 0;
    for (const auto& [r, s] : c.ortho) {
      g[row] = x.row(r).head(d).dot(x.row(s).head(d));
      jac.block(row, r * w, 1, d) = x.row(s).head(d);
      jac.block(row, s * w, 1, d) = x.row(r).head(d);
      ++row;
    }
    for (const auto& [l, p] : c.points) {
      g[row] = x.row(l).head(d).dot(p) - x(l, d);
      jac.block(row, l * w, 1, d) = p.transpose();
      jac(row, l * w + d) = -1.0;
      ++row;
    }
    if (g.lpNorm<Eigen::Infinity>() < 1e-15) break;
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-g);
    for (int l = 0; l < k; ++l) x.row(l) += step.segment(l * w, w).transpose();
    normalize_rows(x);
  }
}

bool collapsed(const Rows& x) {
  const int d = static_cast<int>(x.cols()) - 1;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index s = r + 1; s < x.rows(); ++s) {
      const double nr = x.row(r).head(d).norm();
      const double ns = x.row(s).head(d).norm();
      if (nr == 0 || ns == 0) continue;
      const double cosang = x.row(r).head(d).dot(x.row(s).head(d)) / (nr * ns);
      const double angle = std::acos(std::min(1.0, std::abs(cosang)));
      if (angle >= 1e-6) continue;
      const double sign = cosang >= 0 ? 1.0 : -1.0;
      if (std::abs(x(r, d) / nr - sign * x(s, d) / ns) < 1e-6) return true;
    }
  }
  return false;
}

double min_normal(const Rows& x) {
  const int d = static_cast<int>(x.cols()) - 1;
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 0; l < x.rows(); ++l) {
    m = std::min(m, x.row(l).head(d).norm());
  }
  return m;
}

// --- prepared data ------------------------------------------------------------

struct MassData {
  int stage = 0;
  std::string label;
  Eigen::MatrixXd pts;
  Eigen::VectorXd w;
  double total = 0.0;
};

struct Dataset {
  std::vector<MassData> masses;  // sorted by (stage, j)
  Constraints constraints;
  double diameter = 1.0;
};

struct Blocks {
  std::vector<EquipartitionResidual> eq;
  std::vector<OrthogonalityResidual> ortho;
  std::vector<ContainmentResidual> cont;
};

double evaluate(const Dataset& data, const Rows& x, EvaluationMode mode,
                double tau, const SolverConfig& cfg, Blocks* blocks) {
  const int d = static_cast<int>(x.cols()) - 1;
  double eq = 0.0;
  for (const auto& mass : data.masses) {
    const auto regions = cut(mass.pts, mass.w, x, mass.stage, mode, tau);
    const double target = mass.total / static_cast<double>(regions.size());
    for (std::size_t g = 0; g < regions.size(); ++g) {
      const double v = (regions[g] - target) / mass.total;
      eq += v * v;
      if (blocks) {
        blocks->eq.push_back({mass.label, mass.stage + 1, static_cast<int>(g), v});
      }
    }
  }
  double orth = 0.0;
  for (const auto& [r, s] : data.constraints.ortho) {
    const double nr = x.row(r).head(d).norm();
    const double ns = x.row(s).head(d).norm();
    const double v = nr > 0 && ns > 0
                         ? x.row(r).head(d).dot(x.row(s).head(d)) / (nr * ns)
                         : 1.0;
    orth += v * v;
    if (blocks) blocks->ortho.push_back({{r, s}, v});
  }
  double cont = 0.0;
  for (std::size_t idx = 0; idx < data.constraints.points.size(); ++idx) {
    const auto& [l, p] = data.constraints.points[idx];
    const double nl = x.row(l).head(d).norm();
    const double v = nl > 0 ? (x.row(l).head(d).dot(p) - x(l, d)) / nl
                            : std::numeric_limits<double>::infinity();
    cont += v * v;
    if (blocks) blocks->cont.push_back({l, static_cast<int>(idx), v});
  }
  return eq + cfg.ortho_weight * orth + cfg.containment_weight * cont;
}

// --- Nelder-Mead over the raw parameter vector ----------------------------------

struct NmContext {
  const std::function<double(const Eigen::VectorXd&)>* f;
};

double nm_trampoline(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const NmContext*>(params);
  Eigen::VectorXd y(v->size);
  for (std::size_t i = 0; i < v->size; ++i) y[i] = gsl_vector_get(v, i);
  const double val = (*ctx->f)(y);
  return std::isfinite(val) ? val : 1e6;
}

Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& y0, double step, int iterations) {
  const std::size_t n = static_cast<std::size_t>(y0.size());
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, y0[i]);
  gsl_vector_set_all(ss, step);
  NmContext ctx{&f};
  gsl_multimin_function fn{&nm_trampoline, n, &ctx};
  gsl_multimin_fminimizer* s =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  for (int it = 0; it < iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_fminimizer_size(s) < 1e-12) break;
  }
  Eigen::VectorXd out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gsl_vector_get(s->x, i);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return out;
}

Eigen::VectorXd flatten(const Rows& x) {
  Eigen::VectorXd y(x.size());
  const auto w = x.cols();
  for (Eigen::Index l = 0; l < x.rows(); ++l) y.segment(l * w, w) = x.row(l).transpose();
  return y;
}

Rows unflatten(const Eigen::VectorXd& y, int k, int w) {
  Rows x(k, w);
  for (int l = 0; l < k; ++l) x.row(l) = y.segment(l * w, w).transpose();
  return x;
}

struct SearchState {
  const Dataset* data;
  const SolverConfig* cfg;
  int k;
  int w;
  std::int64_t evaluations = 0;

  Rows map(const Eigen::VectorXd& y) const {
    Rows x = unflatten(y, k, w);
    project(x, data->constraints);
    return x;
  }

  double objective(const Eigen::VectorXd& y, EvaluationMode mode, double tau) {
    ++evaluations;
    const Rows x = map(y);
    const double mn = min_normal(x);
    if (mn < cfg->eps_affinity) return kInvalidPenalty + (cfg->eps_affinity - mn);
    return evaluate(*data, x, mode, tau, *cfg, nullptr);
  }
};

Dataset subsample(const Dataset& full, int per_mass) {
  Dataset out;
  out.constraints = full.constraints;
  out.diameter = full.diameter;
  for (const auto& m : full.masses) {
    const Eigen::Index n = m.pts.rows();
    if (per_mass <= 0 || n <= per_mass) {
      out.masses.push_back(m);
      continue;
    }
    const Eigen::Index stride = (n + per_mass - 1) / per_mass;
    const Eigen::Index count = (n + stride - 1) / stride;
    MassData s{m.stage, m.label, Eigen::MatrixXd(count, m.pts.cols()),
               Eigen::VectorXd(count), m.total};
    for (Eigen::Index i = 0; i < count; ++i) {
      s.pts.row(i) = m.pts.row(i * stride);
      s.w[i] = m.w[i * stride];
    }
    s.w *= m.total / s.w.sum();
    out.masses.push_back(std::move(s));
  }
  return out;
}

struct StartResult {
  Rows x;
  double objective = std::numeric_limits<double>::infinity();
  int restarts = 0;
  std::int64_t evaluations = 0;
};

double tau_at(const SolverConfig& cfg, double diameter, int stage) {
  if (cfg.anneal_stages <= 1) return cfg.tau_end * diameter;
  const double t = static_cast<double>(stage) / (cfg.anneal_stages - 1);
  return diameter * cfg.tau_start * std::pow(cfg.tau_end / cfg.tau_start, t);
}

StartResult run_start(const Dataset& sub, const Dataset& full,
                      const SolverConfig& cfg, int k, int d, int index) {
  const std::uint64_t s = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  SearchState state{&sub, &cfg, k, d + 1};
  StartResult result;
  for (;;) {
    Eigen::VectorXd y(k * (d + 1));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    for (int stage = 0; stage < cfg.anneal_stages; ++stage) {
      const double tau = tau_at(cfg, sub.diameter, stage);
      const double step = std::clamp(tau / sub.diameter, 0.005, 0.5);
      std::function<double(const Eigen::VectorXd&)> f =
          [&](const Eigen::VectorXd& v) {
            return state.objective(v, EvaluationMode::kSmoothed, tau);
          };
      y = flatten(state.map(nelder_mead(f, y, step, cfg.stage_iterations)));
    }
    result.x = state.map(y);
    if (collapsed(result.x) && result.restarts < cfg.max_restarts) {
      ++result.restarts;
      continue;
    }
    break;
  }
  SearchState scorer{&full, &cfg, k, d + 1};
  result.objective = scorer.objective(flatten(result.x), EvaluationMode::kHard, 0.0);
  result.evaluations = state.evaluations + scorer.evaluations;
  return result;
}

StartResult polish(const Dataset& full, const SolverConfig& cfg, int k, int d,
                   StartResult start) {
  SearchState state{&full, &cfg, k, d + 1};
  const double tau = cfg.tau_end * full.diameter;
  const int iters = std::max(1, cfg.polish_iterations / 2);
  std::function<double(const Eigen::VectorXd&)> smooth =
      [&](const Eigen::VectorXd& v) {
        return state.objective(v, EvaluationMode::kSmoothed, tau);
      };
  std::function<double(const Eigen::VectorXd&)> hard =
      [&](const Eigen::VectorXd& v) {
        return state.objective(v, EvaluationMode::kHard, 0.0);
      };
  Eigen::VectorXd y = flatten(start.x);
  for (const auto* f : {&smooth, &hard}) {
    const double step = f == &smooth ? 0.01 : 1e-3;
    const Eigen::VectorXd cand = flatten(state.map(nelder_mead(*f, y, step, iters)));
    const double val = hard(cand);
    if (val < start.objective) {
      start.objective = val;
      start.x = state.map(cand);
      y = cand;
    }
  }
  start.evaluations += state.evaluations;
  return start;
}

template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) fn(i);
  };
  if (jobs <= 1 || count <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int j = 0; j < std::min(jobs, count); ++j) pool.emplace_back(worker);
}

void ensure_gsl_quiet() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

Eigen::MatrixXd read_matrix(const nlohmann::json& doc, int rows, int cols,
                            const std::string& what) {
  if (!doc.is_array() || static_cast<int>(doc.size()) != rows) {
    config_error(what + " must have " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto row = doc[r].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != cols) {
      config_error(what + " rows must have " + std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

Eigen::VectorXd read_vector(const nlohmann::json& doc, int n,
                            const std::string& what) {
  const auto v = doc.get<std::vector<double>>();
  if (n >= 0 && static_cast<int>(v.size()) != n) {
    config_error(what + " must have " + std::to_string(n) + " entries");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string_view mode_name(EvaluationMode m) {
  return m == EvaluationMode::kHard ? "hard" : "smoothed";
}

}  // namespace

// --- public types ------------------------------------------------------------

void SampledMass::validate() const {
  if (points.rows() < 1) config_error("mass " + label + " has no points");
  if (weights.size() != points.rows()) {
    throw Error(ErrorKind::kShape, "mass " + label + " weight count mismatch");
  }
  if ((weights.array() <= 0).any()) {
    config_error("mass " + label + " has a non-positive weight");
  }
  if (!points.allFinite() || !weights.allFinite()) {
    config_error("mass " + label + " has non-finite entries");
  }
}

HyperplaneParam HyperplaneParam::from_raw(const Eigen::VectorXd& normal,
                                          double offset) {
  const double n = std::sqrt(normal.squaredNorm() + offset * offset);
  if (n == 0) throw Error(ErrorKind::kDomain, "hyperplane parameter is zero");
  return {normal / n, offset / n};
}

double HyperplaneParam::signed_distance(const Eigen::VectorXd& u) const {
  return (normal.dot(u) - offset) / normal.norm();
}

void HyperplaneParam::validate(double eps_affinity) const {
  const double n = std::sqrt(normal.squaredNorm() + offset * offset);
  if (std::abs(n - 1.0) > 1e-12) {
    throw Error(ErrorKind::kDomain, "hyperplane parameter is not on the unit sphere");
  }
  if (normal.norm() < eps_affinity) {
    throw Error(ErrorKind::kDomain, "hyperplane parameter is the hyperplane at infinity");
  }
}

nlohmann::json HyperplaneParam::to_json() const {
  return {{"normal", vector_json(normal)}, {"offset", offset}};
}

HyperplaneParam HyperplaneParam::from_json(const nlohmann::json& doc) {
  try {
    return {read_vector(doc.at("normal"), -1, "normal"), doc.at("offset").get<double>()};
  } catch (const nlohmann::json::exception& ex) {
    config_error(std::string("malformed hyperplane: ") + ex.what());
  }
}

int GaussianMixture::dim() const {
  return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
}

GaussianMixture GaussianMixture::from_json(const nlohmann::json& doc, int d) {
  try {
    if (!doc.is_array() || doc.empty()) config_error("mixture must be a non-empty list");
    GaussianMixture g;
    for (const auto& c : doc) {
      GaussianComponent comp;
      comp.mean = read_vector(c.at("mean"), d, "mean");
      const auto& cov = c.contains("cov") ? c.at("cov") : nlohmann::json("I");
      if (cov.is_string()) {
        if (cov.get<std::string>() != "I") config_error("cov string must be \"I\"");
        comp.cov = Eigen::MatrixXd::Identity(d, d);
      } else if (cov.is_number()) {
        comp.cov = cov.get<double>() * Eigen::MatrixXd::Identity(d, d);
      } else {
        comp.cov = read_matrix(cov, d, d, "cov");
      }
      comp.weight = c.value("weight", 1.0);
      g.components.push_back(std::move(comp));
    }
    return g;
  } catch (const nlohmann::json::exception& ex) {
    config_error(std::string("malformed mixture: ") + ex.what());
  }
}

nlohmann::json GaussianMixture::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : components) {
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.cov.rows(); ++r) {
      cov.push_back(vector_json(c.cov.row(r).transpose()));
    }
    out.push_back({{"mean", vector_json(c.mean)}, {"cov", cov}, {"weight", c.weight}});
  }
  return out;
}

SampledMass sample_gaussian_mixture(const GaussianMixture& spec, int n,
                                    std::uint64_t seed, std::string label) {
  if (n < 1) config_error("sample count must be >= 1");
  if (spec.components.empty()) config_error("mixture has no components");
  const int d = spec.dim();
  if (d < 1) config_error("mixture dimension must be >= 1");
  std::vector<double> weights;
  std::vector<Eigen::MatrixXd> factors;
  for (const auto& c : spec.components) {
    if (!(c.weight > 0) || !std::isfinite(c.weight)) {
      config_error("mixture weights must be positive");
    }
    if (c.mean.size() != d || c.cov.rows() != d || c.cov.cols() != d) {
      config_error("mixture components disagree on dimension");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() != Eigen::Success) config_error("covariance is not positive definite");
    weights.push_back(c.weight);
    factors.push_back(llt.matrixL());
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  SampledMass mass;
  mass.label = std::move(label);
  mass.points.resize(n, d);
  mass.weights = Eigen::VectorXd::Constant(n, total / n);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    const int c = spec.components.size() == 1 ? 0 : pick(rng);
    for (int j = 0; j < d; ++j) z[j] = normal(rng);
    mass.points.row(i) = (spec.components[c].mean + factors[c] * z).transpose();
  }
  mass.generator = {{"mixture", spec.to_json()}, {"N", n}, {"seed", seed}};
  return mass;
}

std::vector<double> region_masses(const SampledMass& mass,
                                  const std::vector<HyperplaneParam>& hyperplanes,
                                  int stage, EvaluationMode mode, double tau) {
  mass.validate();
  const int k = static_cast<int>(hyperplanes.size());
  if (k < 1 || stage < 1 || stage > k) {
    throw Error(ErrorKind::kDomain, "stage must lie in 1..k");
  }
  for (const auto& h : hyperplanes) {
    if (h.normal.size() != mass.dim()) {
      throw Error(ErrorKind::kShape, "hyperplane and mass dimensions differ");
    }
  }
  if (mode == EvaluationMode::kSmoothed && !(tau > 0)) {
    throw Error(ErrorKind::kDomain, "smoothed evaluation needs tau > 0");
  }
  return cut(mass.points, mass.weights, to_rows(hyperplanes), stage - 1, mode, tau);
}

nlohmann::json SolverConfig::to_json() const {
  return {{"starts", starts},
          {"tol", tol},
          {"seed", seed},
          {"subsample", subsample},
          {"polish", polish},
          {"anneal_stages", anneal_stages},
          {"tau_start", tau_start},
          {"tau_end", tau_end},
          {"stage_iterations", stage_iterations},
          {"polish_iterations", polish_iterations},
          {"max_restarts", max_restarts},
          {"eps_affinity", eps_affinity},
          {"ortho_weight", ortho_weight},
          {"containment_weight", containment_weight},
          {"jobs", jobs}};
}

SolverConfig SolverConfig::from_json(const nlohmann::json& doc) {
  try {
    SolverConfig c;
    c.starts = doc.value("starts", c.starts);
    c.tol = doc.value("tol", c.tol);
    c.seed = doc.value("seed", c.seed);
    c.subsample = doc.value("subsample", c.subsample);
    c.polish = doc.value("polish", c.polish);
    c.anneal_stages = doc.value("anneal_stages", c.anneal_stages);
    c.tau_start = doc.value("tau_start", c.tau_start);
    c.tau_end = doc.value("tau_end", c.tau_end);
    c.stage_iterations = doc.value("stage_iterations", c.stage_iterations);
    c.polish_iterations = doc.value("polish_iterations", c.polish_iterations);
    c.max_restarts = doc.value("max_restarts", c.max_restarts);
    c.eps_affinity = doc.value("eps_affinity", c.eps_affinity);
    c.ortho_weight = doc.value("ortho_weight", c.ortho_weight);
    c.containment_weight = doc.value("containment_weight", c.containment_weight);
    c.jobs = doc.value("jobs", c.jobs);
    if (c.starts < 1 || c.tol <= 0 || c.anneal_stages < 1 || c.tau_start <= 0 ||
        c.tau_end <= 0 || c.eps_affinity <= 0 || c.polish < 0) {
      config_error("solver configuration out of range");
    }
    return c;
  } catch (const nlohmann::json::exception& ex) {
    config_error(std::string("malformed solver configuration: ") + ex.what());
  }
}

nlohmann::json SolverDiagnostics::to_json() const {
  return {{"starts", starts},
          {"restarts", restarts},
          {"best_start", best_start},
          {"evaluations", evaluations}};
}

double MassArrangementWitness::max_equipartition() const {
  double m = 0.0;
  for (const auto& r : equipartition) m = std::max(m, std::abs(r.value));
  return m;
}

double MassArrangementWitness::max_orthogonality() const {
  double m = 0.0;
  for (const auto& r : orthogonality) m = std::max(m, std::abs(r.value));
  return m;
}

double MassArrangementWitness::max_containment() const {
  double m = 0.0;
  for (const auto& r : containment) m = std::max(m, std::abs(r.value));
  return m;
}

nlohmann::json MassArrangementWitness::to_json() const {
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& h : hyperplanes) hs.push_back(h.to_json());
  nlohmann::json eq = nlohmann::json::array();
  for (const auto& r : equipartition) {
    eq.push_back({{"label", r.label}, {"stage", r.stage}, {"region", r.region},
                  {"value", r.value}});
  }
  nlohmann::json orth = nlohmann::json::array();
  for (const auto& r : orthogonality) {
    orth.push_back({{"pair", {r.pair.first + 1, r.pair.second + 1}}, {"value", r.value}});
  }
  nlohmann::json cont = nlohmann::json::array();
  for (const auto& r : containment) {
    cont.push_back({{"hyperplane", r.hyperplane + 1}, {"point", r.point + 1},
                    {"value", r.value}});
  }
  nlohmann::json doc{{"schema_version", 1},
                     {"hyperplanes", hs},
                     {"residuals",
                      {{"equipartition", eq},
                       {"orthogonality", orth},
                       {"containment", cont}}},
                     {"objective", objective},
                     {"evaluation_mode", mode_name(mode)},
                     {"success", success},
                     {"diagnostics", diagnostics.to_json()}};
  doc["seed"] = seed ? nlohmann::json(*seed) : nullptr;
  doc["config"] = config;
  return doc;
}

MassArrangementWitness residuals(const ConstraintProblem& problem,
                                 const std::vector<SampledMass>& masses,
                                 const std::vector<HyperplaneParam>& hyperplanes,
                                 const std::vector<ContainmentPoint>& points,
                                 EvaluationMode mode, double tau,
                                 const SolverConfig& config) {
  if (static_cast<int>(hyperplanes.size()) != problem.k()) {
    throw Error(ErrorKind::kShape, "expected k hyperplanes");
  }
  const int d = static_cast<int>(hyperplanes.front().normal.size());
  for (const auto& h : hyperplanes) {
    if (h.normal.size() != d) throw Error(ErrorKind::kShape, "hyperplane dimensions differ");
  }
  if (mode == EvaluationMode::kSmoothed && !(tau > 0)) {
    throw Error(ErrorKind::kDomain, "smoothed evaluation needs tau > 0");
  }
  const Layout layout = make_layout(problem, masses, points, d);

  Dataset data;
  for (int idx : layout.order) {
    const auto& m = masses[idx];
    data.masses.push_back({layout.stage[idx], m.label, m.points, m.weights, m.total()});
  }
  data.constraints.ortho = problem.ortho();
  for (const auto& p : points) data.constraints.points.emplace_back(p.hyperplane, p.coords);

  Blocks blocks;
  MassArrangementWitness w;
  w.hyperplanes = hyperplanes;
  w.objective = evaluate(data, to_rows(hyperplanes), mode, tau, config, &blocks);
  w.equipartition = std::move(blocks.eq);
  w.orthogonality = std::move(blocks.ortho);
  w.containment = std::move(blocks.cont);
  w.mode = mode;
  return w;
}

MassArrangementWitness solve(const ConstraintProblem& problem,
                             const std::vector<SampledMass>& masses,
                             const std::vector<ContainmentPoint>& points,
                             const SolverConfig& config) {
  ensure_gsl_quiet();
  if (masses.empty()) config_error("solve needs at least one mass");
  const int k = problem.k();
  const int d = masses.front().dim();
  if (d < 1) config_error("masses must live in R^d with d >= 1");
  const Layout layout = make_layout(problem, masses, points, d);

  // Work in standardized coordinates u' = (u - c) / s so random starts on
  // S^d land near the data.
  double wsum = 0.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  for (const auto& m : masses) {
    c += m.points.transpose() * m.weights;
    wsum += m.total();
  }
  c /= wsum;
  double var = 0.0;
  for (const auto& m : masses) {
    var += ((m.points.rowwise() - c.transpose()).rowwise().squaredNorm().array() *
            m.weights.array())
               .sum();
  }
  double scale = std::sqrt(var / wsum);
  if (!(scale > 0)) scale = 1.0;

  Dataset full;
  double radius = 0.0;
  for (int idx : layout.order) {
    const auto& m = masses[idx];
    MassData md{layout.stage[idx], m.label,
                (m.points.rowwise() - c.transpose()) / scale, m.weights, m.total()};
    radius = std::max(radius, md.pts.rowwise().norm().maxCoeff());
    full.masses.push_back(std::move(md));
  }
  full.diameter = radius > 0 ? 2.0 * radius : 1.0;
  full.constraints.ortho = problem.ortho();
  for (const auto& p : points) {
    full.constraints.points.emplace_back(p.hyperplane, (p.coords - c) / scale);
  }
  const Dataset sub = subsample(full, config.subsample);

  std::vector<StartResult> starts(config.starts);
  parallel_for(config.starts, config.jobs, [&](int i) {
    starts[i] = run_start(sub, full, config, k, d, i);
  });

  std::vector<int> rank(config.starts);
  std::iota(rank.begin(), rank.end(), 0);
  auto by_objective = [&](int x, int y) {
    if (starts[x].objective != starts[y].objective) {
      return starts[x].objective < starts[y].objective;
    }
    return x < y;
  };
  std::stable_sort(rank.begin(), rank.end(), by_objective);
  const int polish_count = std::min(config.polish, config.starts);
  parallel_for(polish_count, config.jobs, [&](int i) {
    starts[rank[i]] = polish(full, config, k, d, std::move(starts[rank[i]]));
  });
  const int best = *std::min_element(rank.begin(), rank.end(), by_objective);

  SolverDiagnostics diag;
  diag.starts = config.starts;
  diag.best_start = best;
  for (const auto& s : starts) {
    diag.restarts += s.restarts;
    diag.evaluations += s.evaluations;
  }

  // Back to the input coordinates: <u,a'> - s b' - <c,a'> keeps its sign.
  Rows x = starts[best].x;
  for (int l = 0; l < k; ++l) {
    x(l, d) = scale * x(l, d) + x.row(l).head(d).dot(c);
  }
  Constraints original;
  original.ortho = problem.ortho();
  for (const auto& p : points) original.points.emplace_back(p.hyperplane, p.coords);
  project(x, original);

  auto witness = residuals(problem, masses, from_rows(x), points,
                           EvaluationMode::kHard, 0.0, config);
  const bool valid = !collapsed(x) && min_normal(x) >= config.eps_affinity;
  witness.success = valid && witness.objective < config.tol;
  witness.seed = config.seed;
  witness.config = config.to_json();
  witness.diagnostics = diag;
  return witness;
}

MassSpec MassSpec::from_json(const nlohmann::json& doc, std::uint64_t seed) {
  try {
    MassSpec spec;
    spec.d = doc.at("d").get<int>();
    if (spec.d < 1) config_error("mass spec needs d >= 1");
    const auto& list = doc.at("masses");
    if (!list.is_array() || list.empty()) config_error("mass spec needs masses");
    for (std::size_t idx = 0; idx < list.size(); ++idx) {
      const auto& entry = list[idx];
      const auto label = entry.at("label").get<std::string>();
      if (entry.contains("samples")) {
        const auto& samples = entry.at("samples");
        SampledMass m;
        m.label = label;
        m.points = read_matrix(samples, static_cast<int>(samples.size()), spec.d, "samples");
        m.weights = entry.contains("weights")
                        ? read_vector(entry.at("weights"), static_cast<int>(samples.size()),
                                      "weights")
                        : Eigen::VectorXd::Constant(samples.size(), 1.0 / samples.size());
        m.validate();
        spec.masses.push_back(std::move(m));
        continue;
      }
      const auto mixture = GaussianMixture::from_json(entry.at("mixture"), spec.d);
      const int n = entry.at("N").get<int>();
      const std::uint64_t mass_seed =
          entry.contains("seed") ? entry.at("seed").get<std::uint64_t>()
                                 : splitmix64(seed + idx);
      spec.masses.push_back(sample_gaussian_mixture(mixture, n, mass_seed, label));
    }
    if (doc.contains("points")) {
      for (const auto& p : doc.at("points")) {
        ContainmentPoint cp;
        cp.hyperplane = p.at("hyperplane").get<int>() - 1;
        cp.coords = read_vector(p.at("coords"), spec.d, "coords");
        spec.points.push_back(std::move(cp));
      }
    }
    if (doc.contains("problem")) spec.problem = ConstraintProblem::from_json(doc.at("problem"));
    if (doc.contains("config")) spec.config = SolverConfig::from_json(doc.at("config"));
    return spec;
  } catch (const nlohmann::json::exception& ex) {
    config_error(std::string("malformed mass spec: ") + ex.what());
  }
}

}  // namespace equipart
