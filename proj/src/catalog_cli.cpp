#include "temperlab/catalog_cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "temperlab/delta_estimator.hpp"
#include "temperlab/harmonic_verify.hpp"
#include "temperlab/rhofun.hpp"

namespace temperlab::catalog_cli {

namespace {

using beta_solver::PairSpec;
using beta_solver::Verdict;
using matgroup::SubgroupSpec;

// Rational embedding whose columns are the diagonals of the subgroup's
// Cartan basis, in the full n diagonal coordinates.
RatMat block_embedding(int n, int block_size, int pos) {
  RatMat emb(n, RatVec(block_size - 1, Rat(0)));
  for (int i = 0; i + 1 < block_size; ++i) {
    emb[pos + i][i] = Rat(1);
    emb[pos + i + 1][i] = Rat(-1);
  }
  return emb;
}

RatMat torus_embedding(int n) { return block_embedding(n, n, 0); }

PairSpec pair_from_spec(const std::string& label, const SubgroupSpec& spec) {
  auto h_basis = matgroup::lie_basis(spec);
  auto cartan = matgroup::cartan_subspace_basis(spec);
  auto self = rhofun::adjoint_weight_system(h_basis, cartan, rhofun::AdjointSpace::kSelf);
  auto ambient = rhofun::adjoint_weight_system(h_basis, cartan, rhofun::AdjointSpace::kAmbient);
  if (!self.exact() || !ambient.exact())
    throw std::runtime_error("catalog: adjoint weights did not rationalize for " + label);
  return PairSpec(static_cast<int>(cartan.size()), self.system, ambient.system, label);
}

CatalogEntry make_block_entry(const std::string& name, int n, int k) {
  CatalogEntry e;
  e.name = name;
  e.n = n;
  e.h_spec = SubgroupSpec::block_reductive(n, {k}, {0});
  e.pair = pair_from_spec(name, e.h_spec);
  e.embedding = block_embedding(n, k, 0);
  e.expected_beta = Rat(k - 1, n - 1);
  e.provenance = "extreme ray (1,0,...,0,-1) of the block chamber; confirmed by the sampling oracle";
  e.reductive = true;
  return e;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> entries;

  for (int n = 3; n <= 6; ++n)
    for (int k = 2; k < n; ++k)
      entries.push_back(make_block_entry("sl" + std::to_string(k) + "-in-sl" + std::to_string(n), n, k));

  for (int n : {2, 3}) {
    CatalogEntry e;
    e.name = "g-equals-h-sl" + std::to_string(n);
    e.n = n;
    e.h_spec = SubgroupSpec::block_reductive(n, {n}, {0});
    e.pair = pair_from_spec(e.name, e.h_spec);
    e.embedding = block_embedding(n, n, 0);
    e.expected_beta = Rat(1);
    e.provenance = "H = G, ratio identically one off the walls";
    e.reductive = true;
    entries.push_back(e);
  }

  for (int n : {2, 3}) {
    CatalogEntry e;
    e.name = "torus-in-sl" + std::to_string(n);
    e.n = n;
    e.h_spec = SubgroupSpec::diagonal_torus(n);
    e.pair = pair_from_spec(e.name, e.h_spec);
    e.embedding = torus_embedding(n);
    e.expected_beta = Rat(0);
    e.provenance = "abelian subalgebra, rho_h vanishes identically";
    e.reductive = true;
    entries.push_back(e);
  }

  for (int n : {2, 3}) {
    CatalogEntry e;
    e.name = "unipotent-in-sl" + std::to_string(n);
    e.n = n;
    e.h_spec = SubgroupSpec::upper_unipotent(n);
    e.pair = pair_from_spec(e.name, e.h_spec);
    e.embedding = {};  // no split torus, zero-dimensional parameter space
    e.expected_beta = Rat(0);
    e.provenance = "nilpotent subalgebra, empty Cartan subspace";
    e.reductive = false;
    entries.push_back(e);
  }

  {
    CatalogEntry e;
    e.name = "sl2z-lattice";
    e.n = 2;
    auto s = matgroup::GroupElement::from_rational({{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}});
    auto t = matgroup::GroupElement::from_rational({{Rat(1), Rat(1)}, {Rat(0), Rat(1)}});
    e.h_spec = SubgroupSpec::discrete(2, {s, t});
    e.provenance = "lattice in SL(2,R); growth exponent 1";
    e.discrete = true;
    e.delta_depth_schedule = {16, 20, 24};
    entries.push_back(e);
  }
  {
    CatalogEntry e;
    e.name = "cyclic-hyperbolic";
    e.n = 2;
    e.h_spec = SubgroupSpec::discrete(
        2, {matgroup::GroupElement::from_rational({{Rat(2), Rat(0)}, {Rat(0), Rat(1, 2)}})});
    e.provenance = "cyclic hyperbolic subgroup; linear orbit growth";
    e.discrete = true;
    e.delta_depth_schedule = {12, 24, 40};
    entries.push_back(e);
  }
  return entries;
}

ojson spec_to_json(const SubgroupSpec& spec) {
  ojson j;
  j["n"] = spec.n;
  if (std::holds_alternative<matgroup::DiagonalTorus>(spec.variant)) {
    j["variant"] = "diagonal-torus";
  } else if (std::holds_alternative<matgroup::UpperUnipotent>(spec.variant)) {
    j["variant"] = "upper-unipotent";
  } else if (const auto* br = std::get_if<matgroup::BlockReductive>(&spec.variant)) {
    j["variant"] = "block-reductive";
    j["sizes"] = br->sizes;
    j["positions"] = br->positions;
  } else if (const auto* dg = std::get_if<matgroup::DiscreteGenerators>(&spec.variant)) {
    j["variant"] = "discrete-generators";
    j["exact"] = dg->exact;
    ojson gens = ojson::array();
    for (const auto& g : dg->generators) {
      ojson m = ojson::array();
      for (int i = 0; i < g.n(); ++i) {
        ojson row = ojson::array();
        for (int c = 0; c < g.n(); ++c)
          row.push_back(g.exact() ? rat_to_json(g.rational()[i][c]) : ojson(g.mat()(i, c)));
        m.push_back(row);
      }
      gens.push_back(m);
    }
    j["gens"] = gens;
  }
  return j;
}

}  // namespace

ojson CatalogEntry::to_json() const {
  ojson j;
  j["name"] = name;
  j["n"] = n;
  j["h_spec"] = spec_to_json(h_spec);
  if (pair) j["pair"] = pair->to_json();
  if (!embedding.empty()) {
    ojson rows = ojson::array();
    for (const auto& r : embedding) rows.push_back(ratvec_to_json(r));
    j["embedding"] = rows;
  }
  if (expected_beta) j["expected_beta"] = rat_to_json(*expected_beta);
  j["provenance"] = provenance;
  j["reductive"] = reductive;
  j["discrete"] = discrete;
  if (!delta_depth_schedule.empty()) j["delta_depth_schedule"] = delta_depth_schedule;
  return j;
}

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

const CatalogEntry& find_entry(const std::string& name) {
  for (const auto& e : catalog_entries())
    if (e.name == name) return e;
  throw std::invalid_argument("unknown catalog entry: " + name);
}

namespace {

struct OutputOptions {
  std::string format = "json";
};

void emit(const ojson& j, const OutputOptions& opt, std::ostream& out) {
  if (opt.format == "json") {
    out << dump_stable(j) << "\n";
    return;
  }
  if (opt.format == "table") {
    size_t width = 0;
    for (auto it = j.begin(); it != j.end(); ++it) width = std::max(width, it.key().size());
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::string v = it.value().is_string() ? it.value().get<std::string>()
                                             : dump_stable(it.value(), 0);
      out << it.key() << std::string(width + 2 - it.key().size(), ' ') << v << "\n";
    }
    return;
  }
  if (opt.format == "csv") {
    if (j.contains("series")) {
      out << "t,value\n";
      for (const auto& row : j["series"])
        out << format_double(row[0].get<double>()) << "," << format_double(row[1].get<double>())
            << "\n";
      return;
    }
    if (j.contains("shells")) {
      out << "R,N\n";
      for (const auto& row : j["shells"])
        out << format_double(row["R"].get<double>()) << "," << row["N"].get<long>() << "\n";
      return;
    }
    throw std::invalid_argument("csv format: this report carries no series");
  }
  throw std::invalid_argument("unknown format: " + opt.format);
}

ojson method_block(uint64_t seed, double det_tol, const ojson& extra = ojson::object()) {
  ojson m;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["det_tol"] = det_tol;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  return m;
}

PairSpec load_pair(const std::string& name, const std::string& file) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open pair file: " + file);
    return PairSpec::from_json(ojson::parse(in));
  }
  const auto& e = find_entry(name);
  if (!e.pair) throw std::invalid_argument("catalog entry " + name + " has no weight pair (discrete)");
  return *e.pair;
}

Verdict verdict_from_bracket(double value, double lower, double upper) {
  if (upper < 0.5) return Verdict::kTempered;
  if (lower > 0.5) return Verdict::kNotTempered;
  (void)value;
  return Verdict::kIndeterminate;
}

int exit_for(Verdict v) { return v == Verdict::kIndeterminate ? 2 : 0; }

int cmd_beta(const std::string& pair_name, const std::string& pair_file, long samples, uint64_t seed,
             double tol, const OutputOptions& opt, std::ostream& out) {
  PairSpec pair = load_pair(pair_name, pair_file);
  auto res = beta_solver::beta_exact(pair);
  double oracle = beta_solver::beta_sample_oracle(pair, samples, seed);
  // A catalog name tells us whether H is reductive; for a raw pair file the
  // Proposition-B max form is the labeling that stays valid for every
  // algebraic subgroup.
  bool reductive = false;
  if (!pair_name.empty()) reductive = find_entry(pair_name).reductive;
  Rat effective = reductive ? res.beta : std::max(res.beta, Rat(1, 2));
  Verdict v = beta_solver::verdict_from_exponent(effective, beta_solver::ExponentKind::kBetaReductive);

  beta_solver::ExponentReport rep;
  rep.label = pair.label;
  rep.beta_exact_value = res.beta;
  rep.beta_oracle = oracle;
  rep.witness = res.witness;
  auto p = beta_solver::p_from_theta(effective);
  rep.p_infinite = !p.has_value();
  if (p) rep.p_exact = *p;
  rep.verdict = v;
  rep.identity_used = reductive ? "theorem-a (reductive: theta = delta = beta)"
                                : "proposition-b (max{theta,1/2} = max{beta,1/2})";
  ojson extra;
  extra["rays_examined"] = res.rays_examined;
  extra["subsets_examined"] = res.subsets_examined;
  extra["oracle_samples"] = samples;
  rep.method = method_block(seed, tol, extra);

  ojson j = rep.to_json();
  // flatten for the CLI contract: "beta" and "verdict" up front
  emit(j, opt, out);
  return exit_for(v);
}

int cmd_delta(const std::string& pair_name, const std::string& gens_file, int depth, uint64_t seed,
              double tol, const OutputOptions& opt, std::ostream& out) {
  if (!gens_file.empty() || (!pair_name.empty() && find_entry(pair_name).discrete)) {
    SubgroupSpec spec = !gens_file.empty() ? matgroup::read_generators_file(gens_file)
                                           : find_entry(pair_name).h_spec;
    std::vector<int> schedule;
    if (!pair_name.empty() && gens_file.empty())
      schedule = find_entry(pair_name).delta_depth_schedule;
    if (schedule.empty() || schedule.back() < depth) {
      schedule.clear();
      for (int d : {depth - 4, depth - 2, depth})
        if (d >= 1 && (schedule.empty() || d > schedule.back())) schedule.push_back(d);
    }
    auto est = delta_estimator::delta_discrete(spec, schedule);
    Verdict v = est.status == delta_estimator::AbscissaEstimate::Status::kOk
                    ? verdict_from_bracket(est.value, est.lower, est.upper)
                    : Verdict::kIndeterminate;
    ojson j = est.to_json();
    j["verdict"] = beta_solver::verdict_name(v);
    j["identity"] = "theorem-a (discrete: theta = delta = sup psi/2rho)";
    j["method"] = method_block(seed, tol);
    emit(j, opt, out);
    return exit_for(v);
  }
  const auto& entry = find_entry(pair_name);
  if (!entry.pair) throw std::invalid_argument("delta: entry has neither generators nor pair");
  std::vector<double> grid;
  for (double t = 0.05; t <= 1.2001; t += 0.05) grid.push_back(t);
  delta_estimator::ReductiveQuadratureOptions qopts;
  qopts.seed = seed;
  auto est = delta_estimator::delta_reductive_quadrature(*entry.pair, entry.embedding, entry.n, grid,
                                                         40.0, qopts);
  Verdict v = est.status == delta_estimator::AbscissaEstimate::Status::kOk
                  ? verdict_from_bracket(est.value, est.lower, est.upper)
                  : Verdict::kIndeterminate;
  ojson j = est.to_json();
  j["verdict"] = beta_solver::verdict_name(v);
  j["identity"] = "theorem-a (reductive: theta = delta = beta)";
  j["method"] = method_block(seed, tol);
  emit(j, opt, out);
  return exit_for(v);
}

int cmd_theta(const std::string& pair_name, double t_max, long samples, uint64_t seed,
              double tol, const OutputOptions& opt, std::ostream& out) {
  const auto& entry = find_entry(pair_name);
  harmonic_verify::QuadratureConfig cfg;
  cfg.mc_samples = samples;
  cfg.seed = seed;
  matgroup::ChartBox box = matgroup::ChartBox::cube(entry.n, 0.5);
  box.lo[entry.n * (entry.n - 1) / 2] = -(t_max * 0.9 + 1.0);
  box.hi[entry.n * (entry.n - 1) / 2] = t_max * 0.9 + 1.0;
  Eigen::VectorXd ray = Eigen::VectorXd::Zero(entry.n);
  ray[0] = 1.0;
  ray[entry.n - 1] = -1.0;
  auto est = harmonic_verify::estimate_theta_ray(entry.h_spec, matgroup::CartanVector(ray), t_max,
                                                 box, cfg);
  double clamped = std::min(1.0, std::max(0.0, est.theta_hat));
  double p = beta_solver::p_from_theta(std::max(clamped, 0.5));
  ojson j;
  j["label"] = entry.name;
  j["theta_hat"] = est.theta_hat;
  j["fit_residual"] = est.fit_residual;
  j["sane"] = est.sane;
  j["p_from_max_theta_half"] = p;
  j["identity"] = "proposition-b (max{theta,1/2} = max{delta,1/2} = max{rho_gh,1/2})";
  ojson series = ojson::array();
  for (auto& [t, c] : est.c_values) series.push_back(ojson::array({t, c}));
  j["series"] = series;
  ojson extra = est.details;
  extra["t_max"] = t_max;
  j["method"] = method_block(seed, tol, extra);
  emit(j, opt, out);
  return est.sane ? 0 : 2;
}

int cmd_spherical(int n, double chi_scale, double t, long nodes, uint64_t seed,
                  double tol, const OutputOptions& opt, std::ostream& out) {
  harmonic_verify::QuadratureConfig cfg;
  cfg.node_count = nodes;
  cfg.seed = seed;
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(n);
  auto rho = rootdata::rho_form(n);
  for (int i = 0; i < n; ++i) chi[i] = chi_scale * rho[i].to_double();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x[0] = t;
  x[n - 1] = -t;
  auto g = matgroup::GroupElement::from_matrix(x.array().exp().matrix().asDiagonal(), 1e-6);
  double val = harmonic_verify::spherical(chi, g, cfg);
  ojson j;
  j["n"] = n;
  j["chi_scale"] = chi_scale;
  j["t"] = t;
  j["value"] = val;
  j["method"] = method_block(seed, tol);
  emit(j, opt, out);
  return 0;
}

int cmd_verify(const std::string& which, int n, double chi_scale, double t_max, long nodes,
               long samples, double radius, uint64_t seed, double tol, const OutputOptions& opt,
               std::ostream& out) {
  harmonic_verify::QuadratureConfig cfg;
  cfg.node_count = nodes;
  cfg.mc_samples = samples;
  cfg.seed = seed;
  if (n != 2) throw std::invalid_argument("verify: n = 2 only");
  Eigen::VectorXd chi(2);
  chi << chi_scale / 2.0, -chi_scale / 2.0;
  matgroup::CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1.0, -1.0))};

  harmonic_verify::VerificationReport rep;
  if (which == "weyl") {
    rep = harmonic_verify::check_weyl_invariance(chi, 32, cfg);
  } else if (which == "spherical-bounds") {
    rep = harmonic_verify::check_spherical_bounds(chi, ray, t_max, cfg);
  } else if (which == "haar") {
    auto bump = [](Eigen::Matrix2d c, double r) {
      return harmonic_verify::TestFunction([c, r](const Eigen::Matrix2d& g) {
        double d2 = (g - c).squaredNorm();
        return d2 < r * r ? std::pow(r * r - d2, 3) : 0.0;
      });
    };
    Eigen::Matrix2d c2;
    c2 << 1.05, 0.12, -0.08, (1.0 + 0.12 * -0.08) / 1.05;
    rep = harmonic_verify::haar_crosscheck({bump(Eigen::Matrix2d::Identity(), 0.3), bump(c2, 0.25)},
                                           cfg);
  } else if (which == "volume-decay") {
    rep = harmonic_verify::volume_decay_conjugation(matgroup::ChartBox::cube(2, 0.5), ray, t_max,
                                                    cfg);
  } else if (which == "volume-growth") {
    rep = harmonic_verify::volume_growth_bgb(ray, t_max, radius, cfg);
  } else {
    throw std::invalid_argument("unknown verify check: " + which);
  }
  ojson j = rep.to_json();
  j["method"] = method_block(seed, tol);
  emit(j, opt, out);
  return rep.pass ? 0 : 1;
}

int cmd_report(const std::string& pair_name, uint64_t seed, long samples, double tol,
               const OutputOptions& opt, std::ostream& out) {
  const auto& entry = find_entry(pair_name);
  beta_solver::ExponentReport rep;
  rep.label = entry.name;
  ojson extra;
  extra["tolerances"] = {{"beta_oracle_slack", 0.02},
                         {"reductive_delta_vs_beta", 0.05},
                         {"verdict_boundary", 0.5}};

  Verdict v = Verdict::kIndeterminate;
  if (entry.pair) {
    auto res = beta_solver::beta_exact(*entry.pair);
    rep.beta_exact_value = res.beta;
    rep.witness = res.witness;
    rep.beta_oracle = beta_solver::beta_sample_oracle(*entry.pair, samples, seed);
    extra["rays_examined"] = res.rays_examined;
    Rat effective = entry.reductive ? res.beta : std::max(res.beta, Rat(1, 2));
    v = beta_solver::verdict_from_exponent(effective, beta_solver::ExponentKind::kBetaReductive);
    auto p = beta_solver::p_from_theta(effective);
    rep.p_infinite = !p.has_value();
    if (p) rep.p_exact = *p;
    rep.identity_used = entry.reductive
                            ? "theorem-a (reductive: theta = delta = beta)"
                            : "proposition-b (max{theta,1/2} = max{delta,1/2} = max{rho_gh,1/2})";
    if (entry.reductive) {
      std::vector<double> grid;
      for (double t = 0.05; t <= 1.2001; t += 0.05) grid.push_back(t);
      delta_estimator::ReductiveQuadratureOptions qopts;
      qopts.seed = seed;
      auto est = delta_estimator::delta_reductive_quadrature(*entry.pair, entry.embedding, entry.n,
                                                             grid, 40.0, qopts);
      rep.delta = est.value;
      rep.delta_bracket = std::make_pair(est.lower, est.upper);
    }
  }
  if (entry.discrete) {
    auto est = delta_estimator::delta_discrete(entry.h_spec, entry.delta_depth_schedule);
    rep.delta = est.value;
    rep.delta_bracket = std::make_pair(est.lower, est.upper);
    v = est.status == delta_estimator::AbscissaEstimate::Status::kOk
            ? verdict_from_bracket(est.value, est.lower, est.upper)
            : Verdict::kIndeterminate;
    rep.identity_used = "theorem-a (discrete: theta = delta = sup psi/2rho)";
    double clamped = std::min(1.0, std::max(0.0, est.value));
    rep.p = beta_solver::p_from_theta(clamped);
    rep.p_infinite = std::isinf(rep.p);
    extra["depth_schedule"] = entry.delta_depth_schedule;
  }
  if (entry.n == 2 && !entry.discrete) {
    harmonic_verify::QuadratureConfig cfg;
    cfg.mc_samples = std::min<long>(samples, 8192);
    cfg.seed = seed;
    double t_max = 5.0;
    matgroup::ChartBox box = matgroup::ChartBox::cube(2, 0.5);
    box.lo[1] = -(t_max * 0.9 + 1.0);
    box.hi[1] = t_max * 0.9 + 1.0;
    matgroup::CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1.0, -1.0))};
    auto est = harmonic_verify::estimate_theta_ray(entry.h_spec, ray, t_max, box, cfg);
    rep.theta_hat = est.theta_hat;
    rep.theta_residual = est.fit_residual;
  }
  rep.verdict = v;
  rep.method = method_block(seed, tol, extra);
  emit(rep.to_json(), opt, out);
  return exit_for(v);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{std::string(kVersion) + " - temperedness exponents for SL(n,R) homogeneous spaces"};
  app.require_subcommand(1);

  OutputOptions opt;
  std::string pair_name, pair_file, gens_file;
  uint64_t seed = 1;
  long samples = 100000;
  long nodes = 2048;
  int depth = 16;
  int n = 2;
  double chi_scale = 0.0, t_max = 10.0, t_val = 1.0, radius = 0.5, tol = 1e-9;
  bool exact_mode = true;

  app.add_option("--format", opt.format, "json|table|csv")->capture_default_str();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--format", opt.format, "json|table|csv");
    cmd->add_option("--tol", tol, "determinant/trace tolerance")->capture_default_str();
  };

  auto* cat = app.add_subcommand("catalog", "list or show catalog entries");
  auto* cat_list = cat->add_subcommand("list", "list entry names");
  auto* cat_show = cat->add_subcommand("show", "show one entry");
  cat_show->add_option("--pair", pair_name, "catalog entry name")->required();
  add_common(cat_show);
  add_common(cat_list);

  auto* beta = app.add_subcommand("beta", "exact local volume decay exponent");
  beta->add_option("--pair", pair_name, "catalog entry name");
  beta->add_option("--pair-file", pair_file, "PairSpec JSON file");
  beta->add_option("--samples", samples, "oracle sample count")->capture_default_str();
  add_common(beta);

  auto* delta = app.add_subcommand("delta", "volume growth exponent");
  delta->add_option("--pair", pair_name, "catalog entry name");
  delta->add_option("--generators", gens_file, "generators JSON file");
  delta->add_option("--depth", depth, "maximum word length")->capture_default_str();
  delta->add_flag("--exact,!--float", exact_mode, "exact rational deduplication");
  add_common(delta);

  auto* theta = app.add_subcommand("theta", "coefficient decay estimator along the chamber ray");
  theta->add_option("--pair", pair_name, "catalog entry name")->required();
  theta->add_option("--tmax", t_max, "ray parameter range")->capture_default_str();
  theta->add_option("--samples", samples, "MC samples")->capture_default_str();
  add_common(theta);

  auto* sph = app.add_subcommand("spherical", "evaluate the spherical function");
  sph->add_option("--n", n, "ambient rank (2 or 3)")->capture_default_str();
  sph->add_option("--chi", chi_scale, "chi as a multiple of rho")->capture_default_str();
  sph->add_option("--t", t_val, "Cartan parameter of a_t")->capture_default_str();
  sph->add_option("--nodes", nodes, "quadrature nodes")->capture_default_str();
  add_common(sph);

  auto* verify = app.add_subcommand("verify", "numerical verification suites");
  std::string which;
  verify->add_option("check", which, "haar|volume-decay|volume-growth|spherical-bounds|weyl")
      ->required();
  verify->add_option("--n", n, "ambient rank")->capture_default_str();
  verify->add_option("--chi", chi_scale, "chi as a multiple of rho")->capture_default_str();
  verify->add_option("--tmax", t_max, "parameter range")->capture_default_str();
  verify->add_option("--nodes", nodes, "quadrature nodes")->capture_default_str();
  verify->add_option("--samples", samples, "MC samples")->capture_default_str();
  verify->add_option("--radius", radius, "KAK ball radius for volume-growth")->capture_default_str();
  add_common(verify);

  auto* report = app.add_subcommand("report", "full exponent report for a catalog entry");
  report->add_option("--pair", pair_name, "catalog entry name")->required();
  report->add_option("--samples", samples, "oracle/MC samples")->capture_default_str();
  add_common(report);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << app.help();
    err << "error: " << e.what() << "\n";
    return 64;
  }

  try {
    if (cat_list->parsed()) {
      ojson j = ojson::array();
      for (const auto& e : catalog_entries()) j.push_back(e.name);
      ojson wrap;
      wrap["entries"] = j;
      emit(wrap, opt, out);
      return 0;
    }
    if (cat_show->parsed()) {
      emit(find_entry(pair_name).to_json(), opt, out);
      return 0;
    }
    if (beta->parsed()) {
      if (pair_name.empty() && pair_file.empty())
        throw std::invalid_argument("beta: need --pair or --pair-file");
      return cmd_beta(pair_name, pair_file, samples, seed, tol, opt, out);
    }
    if (delta->parsed()) {
      if (pair_name.empty() && gens_file.empty())
        throw std::invalid_argument("delta: need --pair or --generators");
      return cmd_delta(pair_name, gens_file, depth, seed, tol, opt, out);
    }
    if (theta->parsed()) return cmd_theta(pair_name, t_max, samples, seed, tol, opt, out);
    if (sph->parsed()) return cmd_spherical(n, chi_scale, t_val, nodes, seed, tol, opt, out);
    if (verify->parsed())
      return cmd_verify(which, n, chi_scale, t_max, nodes, samples, radius, seed, tol, opt, out);
    if (report->parsed()) return cmd_report(pair_name, seed, samples, tol, opt, out);
    err << "error: no subcommand\n";
    return 64;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace temperlab::catalog_cli
