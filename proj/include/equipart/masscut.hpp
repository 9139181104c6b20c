#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equipart/constraint_model.hpp"
#include "json.hpp"

namespace equipart {

// A weighted point cloud standing in for one measure mu_{i,j}.  The label
// "i.j" ties it to stage i (1-based) and index j of the cascade vector.
struct SampledMass {
  std::string label;
  Eigen::MatrixXd points;  // one row per sample
  Eigen::VectorXd weights;
  nlohmann::json generator;  // null when the cloud was given explicitly

  int dim() const { return static_cast<int>(points.cols()); }
  double total() const { return weights.sum(); }
  void validate() const;
};

// A point of S^d: H^0 = {u : <u,a> >= b}, H^1 its complement.
struct HyperplaneParam {
  Eigen::VectorXd normal;
  double offset = 0.0;

  // Scales (normal, offset) to unit length in R^{d+1}.
  static HyperplaneParam from_raw(const Eigen::VectorXd& normal, double offset);
  double signed_distance(const Eigen::VectorXd& u) const;
  void validate(double eps_affinity = 1e-6) const;

  nlohmann::json to_json() const;
  static HyperplaneParam from_json(const nlohmann::json& doc);
};

// H_{hyperplane} must pass through coords.  hyperplane is 0-based.
struct ContainmentPoint {
  int hyperplane = 0;
  Eigen::VectorXd coords;
};

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double weight = 1.0;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;

  int dim() const;
  // Accepts "cov": "I", a scalar variance, or a d x d matrix.
  static GaussianMixture from_json(const nlohmann::json& doc, int d);
  nlohmann::json to_json() const;
};

// N points with equal weights summing to the mixture's total weight.
SampledMass sample_gaussian_mixture(const GaussianMixture& spec, int n,
                                    std::uint64_t seed,
                                    std::string label = "1.1");

enum class EvaluationMode { kHard, kSmoothed };

// Mass of each orthant cut out by H_i..H_k (stage is 1-based).  Bit j of
// the orthant index is set when the point lies on the H^1 side of
// H_{stage+j}.  In hard mode points within 1e-12 of a hyperplane are split
// evenly; in smoothed mode each side indicator is a logistic of the signed
// distance at temperature tau.
std::vector<double> region_masses(const SampledMass& mass,
                                  const std::vector<HyperplaneParam>& hyperplanes,
                                  int stage,
                                  EvaluationMode mode = EvaluationMode::kHard,
                                  double tau = 0.0);

struct EquipartitionResidual {
  std::string label;
  int stage = 1;
  int region = 0;
  double value = 0.0;  // fraction of the mass total
};

struct OrthogonalityResidual {
  OrthoPair pair;
  double value = 0.0;
};

struct ContainmentResidual {
  int hyperplane = 0;
  int point = 0;  // index into the containment point list
  double value = 0.0;
};

struct SolverConfig {
  int starts = 32;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  int subsample = 1000;  // points per mass during annealing
  int polish = 2;        // best starts refined on the full data
  int anneal_stages = 40;
  double tau_start = 0.5;   // fraction of the data diameter
  double tau_end = 1e-3;
  int stage_iterations = 20;
  int polish_iterations = 200;
  int max_restarts = 4;
  double eps_affinity = 1e-6;
  double ortho_weight = 1.0;
  double containment_weight = 1.0;
  int jobs = 1;

  nlohmann::json to_json() const;
  static SolverConfig from_json(const nlohmann::json& doc);
};

struct SolverDiagnostics {
  int starts = 0;
  int restarts = 0;
  int best_start = -1;
  std::int64_t evaluations = 0;

  nlohmann::json to_json() const;
};

struct MassArrangementWitness {
  std::vector<HyperplaneParam> hyperplanes;
  std::vector<EquipartitionResidual> equipartition;
  std::vector<OrthogonalityResidual> orthogonality;
  std::vector<ContainmentResidual> containment;
  double objective = 0.0;
  EvaluationMode mode = EvaluationMode::kHard;
  bool success = false;
  std::optional<std::uint64_t> seed;
  nlohmann::json config;  // echo of the solver configuration, if any
  SolverDiagnostics diagnostics;

  double max_equipartition() const;
  double max_orthogonality() const;
  double max_containment() const;

  nlohmann::json to_json() const;
};

// Evaluates every residual block for given hyperplanes.  Masses must carry
// the labels i.j for 1 <= j <= m_i, and the containment points must number
// a_i for hyperplane i; otherwise a configuration error is raised.
MassArrangementWitness residuals(const ConstraintProblem& problem,
                                 const std::vector<SampledMass>& masses,
                                 const std::vector<HyperplaneParam>& hyperplanes,
                                 const std::vector<ContainmentPoint>& points,
                                 EvaluationMode mode = EvaluationMode::kHard,
                                 double tau = 0.0,
                                 const SolverConfig& config = {});

// Annealed multi-start search.  Never throws on non-convergence; the
// returned witness reports success = false instead.
MassArrangementWitness solve(const ConstraintProblem& problem,
                             const std::vector<SampledMass>& masses,
                             const std::vector<ContainmentPoint>& points,
                             const SolverConfig& config = {});

// {"d":2,"masses":[{"label":"1.1","mixture":[...],"N":1000}],
//  "points":[{"hyperplane":2,"coords":[0,0]}]}.  A mass may instead give
// "samples" (and optionally "weights") directly.
struct MassSpec {
  int d = 0;
  std::vector<SampledMass> masses;
  std::vector<ContainmentPoint> points;
  std::optional<ConstraintProblem> problem;
  std::optional<SolverConfig> config;

  static MassSpec from_json(const nlohmann::json& doc, std::uint64_t seed);
};

}  // namespace equipart
