#include "equipart/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "equipart/atlas.hpp"
#include "equipart/constraint_model.hpp"
#include "equipart/errors.hpp"
#include "equipart/known_values.hpp"
#include "equipart/masscut.hpp"
#include "equipart/obstruction.hpp"
#include "json.hpp"

namespace equipart::cli {

namespace {

using nlohmann::json;

[[noreturn]] void usage(const std::string& what) {
  throw Error(ErrorKind::kUsage, what);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    usage("cannot read " + what + " entry '" + text + "'");
  }
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_int(item, what));
  return out;
}

// all | star | no12 | none | "1-2,2-3"
std::vector<OrthoPair> parse_ortho(const std::string& text, int k) {
  if (text.empty() || text == "none") return {};
  if (text == "all") return ortho_set(OrthoUniverse::kAllPairs, k);
  if (text == "star") return ortho_set(OrthoUniverse::kStarLast, k);
  if (text == "no12") return ortho_set(OrthoUniverse::kAllButFirstPair, k);
  std::vector<OrthoPair> pairs;
  for (const auto& item : split(text, ',')) {
    const auto sep = item.find_first_of("-:");
    if (sep == std::string::npos) usage("ortho pair '" + item + "' is not r-s");
    const int r = parse_int(item.substr(0, sep), "ortho");
    const int s = parse_int(item.substr(sep + 1), "ortho");
    pairs.emplace_back(r - 1, s - 1);
  }
  return pairs;
}

// Bit strings, u_1 first: "011,101".
std::vector<SignVector> parse_extra(const std::string& text) {
  std::vector<SignVector> out;
  for (const auto& item : split(text, ',')) {
    std::vector<int> bits;
    for (char ch : item) {
      if (ch != '0' && ch != '1') usage("extra form '" + item + "' is not a bit string");
      bits.push_back(ch - '0');
    }
    out.push_back(SignVector::from_bits(bits));
  }
  return out;
}

json read_json_arg(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  try {
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
      return json::parse(text);
    }
    std::ifstream in(text);
    if (!in) usage("cannot open '" + text + "'");
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorKind::kConfig, std::string("invalid JSON: ") + ex.what());
  }
}

struct ProblemArgs {
  int k = 0;
  std::string m;
  std::string a;
  std::string ortho;
  std::string extra;
  std::string problem;

  void attach(CLI::App* app) {
    app->add_option("--k", k, "number of hyperplanes");
    app->add_option("--m", m, "cascade vector, e.g. 1,1,2");
    app->add_option("--a", a, "affine containment counts, e.g. 0,1");
    app->add_option("--ortho", ortho, "all | star | no12 | none | r-s,...");
    app->add_option("--extra", extra, "extra characters as bit strings, e.g. 011,101");
    app->add_option("--problem", problem, "problem JSON (inline or file)");
  }

  bool given() const { return !problem.empty() || k > 0; }

  ConstraintProblem build() const {
    if (!problem.empty()) return ConstraintProblem::from_json(read_json_arg(problem));
    if (k < 1) usage("--k (or --problem) is required");
    auto mv = parse_int_list(m, "--m");
    auto av = parse_int_list(a, "--a");
    if (static_cast<int>(mv.size()) > k || static_cast<int>(av.size()) > k) {
      usage("--m and --a take at most k entries");
    }
    mv.resize(k, 0);
    av.resize(k, 0);
    try {
      return ConstraintProblem(k, mv, av, parse_ortho(ortho, k), parse_extra(extra));
    } catch (const Error& ex) {
      if (ex.kind() == ErrorKind::kInternalConsistency) throw;
      throw Error(ErrorKind::kUsage, ex.what());
    }
  }
};

void emit(std::ostream& out, json doc) {
  doc["schema_version"] = 1;
  out << doc.dump(2) << '\n';
}

json known_hits(const ConstraintProblem& p) {
  json hits = json::array();
  for (const auto* kv : lookup_known(p)) hits.push_back(kv->to_json());
  return hits;
}

const char* const kCriterionCite =
    "GF(2) top-class criterion: the instance is solvable in R^d when the "
    "product of its compiled linear forms is u_1^d...u_k^d in "
    "Z2[u_1..u_k]/(u_i^{d+1})";
const char* const kRelaxedCite =
    "nonvanishing top Stiefel-Whitney class of the D-dimensional bundle "
    "(extension of the top-class criterion to D <= kd)";

std::string family_cite(const std::string& name) {
  if (name == "cascade") return "cascade family with affine containment";
  if (name == "ortho-cascade") return "cascade family with full orthogonality";
  if (name == "near-ortho") return "orthogonality on all pairs except (1,2)";
  if (name == "star-ortho") return "orthogonality to the last hyperplane";
  return "Ham Sandwich strengthening: 2^{q+k-1} masses by a cascade";
}

struct Options {
  ProblemArgs problem;
  int d = 0;
  int d_min = 0;
  int d_max = 0;
  std::string mode = "strict";
  std::string format = "json";
  std::string spec;
  std::string family;
  std::string universe = "star";
  bool verbose = false;
  bool cite = false;
  bool full_ortho = false;
  bool no_ortho = false;
  bool no_affine = false;
  bool require_optimal = false;
  bool require_balanced = false;
  int require_maximal_j = 0;
  int max_m = 3;
  int max_a = 2;
  std::uint64_t limit = 10'000'000;
  int q = 0;
  int t = 1;
  int jobs = 1;
  int starts = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

int do_check(const Options& o, std::ostream& out) {
  const auto p = o.problem.build();
  const auto mode = parse_check_mode(o.mode);
  const auto cert = check(p, o.d, mode, o.verbose);
  json doc = cert.to_json();
  if (o.verbose && cert.polynomial) doc["h_text"] = cert.polynomial->to_string();
  doc["known"] = known_hits(p);
  if (o.cite) doc["cite"] = mode == CheckMode::kStrict ? kCriterionCite : kRelaxedCite;
  emit(out, doc);
  return cert.certified() ? kOk : kInconclusive;
}

int do_bound(const Options& o, std::ostream& out) {
  const auto p = o.problem.build();
  json doc{{"problem", p.to_json()},
           {"C", constraint_dimension(p)},
           {"ceil_C_over_k", lower_bound_dim(p)}};
  const int m1 = p.m().front();
  doc["L"] = m1 >= 1 ? json(ramos_L(m1, p.k())) : json(nullptr);
  doc["U"] = m1 >= 1 ? json(upper_U(m1, p.k())) : json(nullptr);
  doc["known"] = known_hits(p);
  if (o.cite) {
    doc["cite"] = {
        {"C", "counting: a solution in R^d needs kd >= C"},
        {"L", "Ramos lower bound ceil(m(2^k-1)/k) for m_1 masses"},
        {"U", "Mani-Levitska, Vrecica, Zivaljevic upper bound 2^{q+k-1}+r"}};
  }
  emit(out, doc);
  return kOk;
}

int do_classify(const Options& o, std::ostream& out) {
  const auto p = o.problem.build();
  json doc = classify(p, o.d).to_json();
  doc["problem"] = p.to_json();
  emit(out, doc);
  return kOk;
}

int do_families(const Options& o, std::ostream& out) {
  const int k = o.problem.k;
  if (k < 1) usage("families needs --k");
  const auto a = parse_int_list(o.problem.a, "--a");
  std::optional<FamilyInstance> inst;
  if (o.family == "cascade") {
    inst = family_cascade(o.q, o.t, a, k);
  } else if (o.family == "ortho-cascade") {
    inst = family_ortho_cascade(o.q, o.t, a, k);
  } else if (o.family == "near-ortho") {
    inst = family_near_ortho(o.q, o.t, k);
  } else if (o.family == "star-ortho") {
    const auto pairs = parse_ortho(o.problem.ortho.empty() ? "star" : o.problem.ortho, k);
    inst = family_star_ortho(o.q, o.t, k, pairs);
  } else if (o.family == "ham-sandwich") {
    inst = family_ham_sandwich_cascade(o.q, k);
  } else {
    usage("unknown family '" + o.family +
          "' (cascade|ortho-cascade|near-ortho|star-ortho|ham-sandwich)");
  }
  const auto cert = check(inst->problem, inst->d, CheckMode::kStrict, o.verbose);
  json doc{{"instance", inst->to_json()}, {"certificate", cert.to_json()}};
  doc["known"] = known_hits(inst->problem);
  if (o.cite) doc["cite"] = family_cite(o.family);
  emit(out, doc);
  return cert.certified() ? kOk : kInconclusive;
}

int do_identities(const Options& o, std::ostream& out) {
  const int k = o.problem.k;
  if (k < 1 || o.d < 1) usage("identities needs --k and --d");
  json results = json::array();
  bool all = true;
  auto record = [&](const char* name, const char* param, int v, bool ok) {
    results.push_back({{"identity", name}, {"k", k}, {param, v}, {"d", o.d}, {"holds", ok}});
    all = all && ok;
  };
  for (int j = 1; j < k; ++j) {
    if (o.d >= k - j) record("vandermonde", "j", j, verify_vandermonde(k, j, o.d));
  }
  for (int i = 1; i <= k; ++i) {
    if (k - i < 31 && o.d >= (1 << (k - i))) {
      record("dickson", "i", i, verify_dickson(k, i, o.d));
    }
  }
  for (int i = 1; i <= k; ++i) {
    if (o.d >= k - 1) record("orthogonal-cascade", "i", i, verify_pki_ortho(k, i, o.d));
  }
  emit(out, {{"results", results}, {"all_hold", all}});
  return all ? kOk : kInternalError;
}

int do_atlas(const Options& o, const CLI::App& sub, std::ostream& out) {
  AtlasQuery q;
  if (!o.spec.empty()) {
    q = AtlasQuery::from_json(read_json_arg(o.spec));
  } else {
    if (o.problem.k < 1) usage("atlas needs a query spec or --k");
    q.k = o.problem.k;
    if (o.d > 0) q.d_min = q.d_max = o.d;
    if (o.d_min > 0) q.d_min = o.d_min;
    if (o.d_max > 0) q.d_max = o.d_max;
    q.max_m = o.max_m;
    q.max_a = o.max_a;
    q.mode = parse_check_mode(o.mode);
    q.allow_ortho = !o.no_ortho;
    q.allow_affine = !o.no_affine;
    if (o.universe == "all") {
      q.universe = AtlasUniverse::kAllPairs;
    } else if (o.universe == "star") {
      q.universe = AtlasUniverse::kStarLast;
    } else if (o.universe == "no12") {
      q.universe = AtlasUniverse::kAllButFirstPair;
    } else {
      q.universe = AtlasUniverse::kCustom;
      q.custom_ortho = parse_ortho(o.universe, q.k);
    }
    q.full_ortho_subsets = o.full_ortho;
    q.require_optimal = o.require_optimal;
    q.require_balanced = o.require_balanced;
    q.require_maximal_j = o.require_maximal_j;
    q.candidate_limit = o.limit;
  }
  if (sub.count("--jobs") > 0) q.jobs = o.jobs;
  const auto format = parse_report_format(o.format);
  const auto rows = enumerate(q);
  if (format == ReportFormat::kJson) {
    json list = json::array();
    for (const auto& row : rows) list.push_back(row.to_json());
    emit(out, {{"query", q.to_json()}, {"count", rows.size()}, {"rows", list}});
  } else {
    out << emit_report(rows, format);
  }
  return rows.empty() ? kInconclusive : kOk;
}

int do_solve(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (o.spec.empty()) usage("solve needs a mass spec");
  const auto doc = read_json_arg(o.spec);
  SolverConfig cfg;
  if (doc.contains("config")) cfg = SolverConfig::from_json(doc.at("config"));
  if (sub.count("--seed") > 0) cfg.seed = o.seed;
  if (sub.count("--tol") > 0) cfg.tol = o.tol;
  if (sub.count("--jobs") > 0) cfg.jobs = o.jobs;
  if (sub.count("--starts") > 0) cfg.starts = o.starts;
  if (cfg.tol <= 0 || cfg.starts < 1) usage("--tol and --starts must be positive");
  const auto spec = MassSpec::from_json(doc, cfg.seed);
  if (!o.problem.given() && !spec.problem) {
    usage("solve needs a problem (in the spec or via --k/--m/--problem)");
  }
  const auto problem = o.problem.given() ? o.problem.build() : *spec.problem;
  const auto witness = solve(problem, spec.masses, spec.points, cfg);
  json w = witness.to_json();
  w["problem"] = problem.to_json();
  w["d"] = spec.d;
  emit(out, w);
  return witness.success ? kOk : kInconclusive;
}

void report(std::ostream& err, std::string_view kind, const std::string& message) {
  json line{{"schema_version", 1}, {"error", kind}, {"message", message}};
  err << line.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Certified engine for constrained hyperplane mass equipartitions",
               "equipart"};
  app.require_subcommand(1, 1);

  auto* check_cmd = app.add_subcommand("check", "decide an instance at dimension d");
  o.problem.attach(check_cmd);
  check_cmd->add_option("--d", o.d, "ambient dimension")->required();
  check_cmd->add_option("--mode", o.mode, "strict | relaxed");
  check_cmd->add_flag("--verbose", o.verbose, "include the product polynomial");
  check_cmd->add_flag("--cite", o.cite, "print the justification");

  auto* bound_cmd = app.add_subcommand("bound", "counting bounds and known values");
  o.problem.attach(bound_cmd);
  bound_cmd->add_flag("--cite", o.cite, "print the justification");

  auto* classify_cmd = app.add_subcommand("classify", "optimality labels at d");
  o.problem.attach(classify_cmd);
  classify_cmd->add_option("--d", o.d, "ambient dimension")->required();

  auto* families_cmd = app.add_subcommand("families", "generate a family instance");
  families_cmd->add_option("family", o.family,
                           "cascade | ortho-cascade | near-ortho | star-ortho | ham-sandwich")
      ->required();
  families_cmd->add_option("--q", o.q, "family parameter q");
  families_cmd->add_option("--t", o.t, "family parameter t");
  families_cmd->add_option("--k", o.problem.k, "number of hyperplanes")->required();
  families_cmd->add_option("--a", o.problem.a, "affine containment counts");
  families_cmd->add_option("--ortho", o.problem.ortho, "pairs for star-ortho");
  families_cmd->add_flag("--verbose", o.verbose, "include the product polynomial");
  families_cmd->add_flag("--cite", o.cite, "print the justification");

  auto* identities_cmd = app.add_subcommand("identities", "run the polynomial identity checks");
  identities_cmd->add_option("--k", o.problem.k, "number of variables")->required();
  identities_cmd->add_option("--d", o.d, "truncation degree")->required();

  auto* atlas_cmd = app.add_subcommand("atlas", "enumerate certified instances");
  atlas_cmd->add_option("spec,--spec", o.spec, "atlas query JSON (inline or file)");
  atlas_cmd->add_option("--k", o.problem.k, "number of hyperplanes");
  atlas_cmd->add_option("--d", o.d, "single dimension");
  atlas_cmd->add_option("--d-min", o.d_min, "smallest dimension");
  atlas_cmd->add_option("--d-max", o.d_max, "largest dimension");
  atlas_cmd->add_option("--max-m", o.max_m, "cap on each m_i");
  atlas_cmd->add_option("--max-a", o.max_a, "cap on each a_i");
  atlas_cmd->add_option("--mode", o.mode, "strict | relaxed");
  atlas_cmd->add_option("--universe", o.universe, "all | star | no12 | r-s,...");
  atlas_cmd->add_flag("--full-ortho", o.full_ortho, "all ortho subsets (k <= 3)");
  atlas_cmd->add_flag("--no-ortho", o.no_ortho, "no orthogonality constraints");
  atlas_cmd->add_flag("--no-affine", o.no_affine, "no containment constraints");
  atlas_cmd->add_flag("--require-optimal", o.require_optimal, "keep optimal rows only");
  atlas_cmd->add_flag("--require-balanced", o.require_balanced, "keep balanced rows only");
  atlas_cmd->add_option("--require-maximal-j", o.require_maximal_j, "keep j-maximal rows");
  atlas_cmd->add_option("--limit", o.limit, "candidate estimate limit");
  atlas_cmd->add_option("--format", o.format, "json | csv | markdown");
  atlas_cmd->add_option("--jobs", o.jobs, "worker threads");

  auto* solve_cmd = app.add_subcommand("solve", "numerically construct a witness");
  solve_cmd->add_option("spec,--spec", o.spec, "mass spec JSON (inline or file)");
  o.problem.attach(solve_cmd);
  solve_cmd->add_option("--seed", o.seed, "master seed (default 0)");
  solve_cmd->add_option("--tol", o.tol, "success threshold on the objective");
  solve_cmd->add_option("--starts", o.starts, "multi-start count");
  solve_cmd->add_option("--jobs", o.jobs, "worker threads");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) {
      app.exit(ex, out, err);
      return kOk;
    }
    report(err, "usage", ex.what());
    return kUsageError;
  }

  try {
    if (*check_cmd) return do_check(o, out);
    if (*bound_cmd) return do_bound(o, out);
    if (*classify_cmd) return do_classify(o, out);
    if (*families_cmd) return do_families(o, out);
    if (*identities_cmd) return do_identities(o, out);
    if (*atlas_cmd) return do_atlas(o, *atlas_cmd, out);
    if (*solve_cmd) return do_solve(o, *solve_cmd, out);
    report(err, "usage", "no subcommand");
    return kUsageError;
  } catch (const Error& ex) {
    report(err, to_string(ex.kind()), ex.what());
    return ex.kind() == ErrorKind::kInternalConsistency ? kInternalError : kUsageError;
  } catch (const nlohmann::json::exception& ex) {
    report(err, "config", ex.what());
    return kUsageError;
  } catch (const std::exception& ex) {
    report(err, "internal", ex.what());
    return kInternalError;
  }
}

}  // namespace equipart::cli
