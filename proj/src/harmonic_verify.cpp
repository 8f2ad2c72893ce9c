#include "temperlab/harmonic_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "temperlab/delta_estimator.hpp"
#include "temperlab/parallel.hpp"
#include "temperlab/rootdata.hpp"
#include "temperlab/rng.hpp"

namespace temperlab::harmonic_verify {

void QuadratureConfig::validate() const {
  if (node_count < 8) throw std::invalid_argument("QuadratureConfig: node_count < 8");
  if (!(truncation > 0.0)) throw std::invalid_argument("QuadratureConfig: truncation <= 0");
  if (mc_samples < 1) throw std::invalid_argument("QuadratureConfig: mc_samples < 1");
}

ojson VerificationReport::to_json() const {
  ojson j;
  j["check"] = check;
  j["params"] = params;
  j["observed_min"] = observed_min;
  j["observed_max"] = observed_max;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["seed"] = seed;
  j["samples"] = samples;
  j["details"] = details;
  if (!series.empty()) {
    ojson s = ojson::array();
    for (const auto& [t, v] : series) s.push_back(ojson::array({t, v}));
    j["series"] = s;
  }
  return j;
}

std::string VerificationReport::to_csv() const {
  std::string out = "t,value\n";
  for (const auto& [t, v] : series) out += format_double(t) + "," + format_double(v) + "\n";
  return out;
}

namespace {

Eigen::Matrix2d so2(double phi) {
  Eigen::Matrix2d k;
  k << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return k;
}

Eigen::MatrixXd diag_exp(const Eigen::VectorXd& x) {
  return x.array().exp().matrix().asDiagonal();
}

// eta(g) as raw QR data, without the GroupElement det checks (hot path).
Eigen::VectorXd eta_of(const Eigen::MatrixXd& g) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::VectorXd eta(g.rows());
  for (int i = 0; i < g.rows(); ++i) {
    double d = qr.matrixQR()(i, i);
    eta[i] = std::log(std::abs(d));
  }
  eta.array() -= eta.sum() / static_cast<double>(g.rows());
  return eta;
}

double covector_dot(const Eigen::VectorXd& c, const Eigen::VectorXd& x) { return c.dot(x); }

Eigen::VectorXd rho_covector(int n) {
  auto rho = rootdata::rho_form(n);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = rho[i].to_double();
  return c;
}

// n = 2: by K-bi-invariance the integral reduces to g = exp(kappa), where
// the integrand is (e^{-2k} cos^2 + e^{2k} sin^2)^{-s} with
// s = (chi_1 - chi_2 + 1)/2. A uniform grid cannot resolve the e^{-2k}
// boundary layer at the peaks, so the quarter period is covered by dyadic
// panels graded toward both ends with Gauss-Legendre nodes in each panel.
double spherical_n2(const Eigen::VectorXd& chi, const Eigen::MatrixXd& g, long nodes) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  double kappa = std::log(svd.singularValues()[0]);
  const double s = (chi[0] - chi[1] + 1.0) / 2.0;
  const double a = std::exp(-2.0 * kappa), b = std::exp(2.0 * kappa);
  auto f = [&](double phi) {
    double c = std::cos(phi), si = std::sin(phi);
    return std::pow(a * c * c + b * si * si, -s);
  };
  // dyadic panel edges from both ends of [0, pi/2]
  const double width = std::max(std::exp(-2.0 * std::abs(kappa)), 1e-14) * 0.5;
  std::vector<double> edges = {0.0, M_PI / 4.0, M_PI / 2.0};
  for (double w = width; w < M_PI / 4.0; w *= 2.0) {
    edges.push_back(w);
    edges.push_back(M_PI / 2.0 - w);
  }
  std::sort(edges.begin(), edges.end());
  const long per_panel = std::max<long>(8, nodes / static_cast<long>(4 * edges.size()));
  static const double gl_x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
  static const double gl_w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
  double acc = 0.0;
  for (size_t e = 0; e + 1 < edges.size(); ++e) {
    double lo = edges[e], hi = edges[e + 1];
    if (!(hi > lo)) continue;
    long reps = std::max<long>(1, per_panel / 8);
    double h = (hi - lo) / static_cast<double>(reps);
    for (long r = 0; r < reps; ++r) {
      double mid = lo + h * (static_cast<double>(r) + 0.5);
      for (int q = 0; q < 8; ++q) acc += gl_w[q] * f(mid + 0.5 * h * gl_x[q]) * 0.5 * h;
    }
  }
  return acc * 2.0 / M_PI;
}

double spherical_n3(const Eigen::VectorXd& chi, const Eigen::MatrixXd& g, long samples,
                    uint64_t seed) {
  const Eigen::VectorXd chi_rho = chi + rho_covector(3);
  Eigen::MatrixXd ginv = g.inverse();
  double acc = 0.0;
  Rng rng(seed);
  for (long j = 0; j < samples; ++j) {
    Eigen::MatrixXd k = matgroup::random_rotation(3, rng);
    acc += std::exp(-covector_dot(chi_rho, eta_of(ginv * k)));
  }
  return acc / static_cast<double>(samples);
}

}  // namespace

double spherical(const Eigen::VectorXd& chi, const matgroup::GroupElement& g,
                 const QuadratureConfig& cfg) {
  cfg.validate();
  if (chi.size() != g.n()) throw std::invalid_argument("spherical: chi dimension mismatch");
  if (g.n() == 2) return spherical_n2(chi, g.mat(), cfg.node_count);
  if (g.n() == 3) return spherical_n3(chi, g.mat(), cfg.mc_samples, cfg.seed);
  throw std::invalid_argument("spherical: only n = 2 and n = 3 are supported");
}

VerificationReport check_weyl_invariance(const Eigen::VectorXd& chi, long sample_count,
                                         const QuadratureConfig& cfg) {
  cfg.validate();
  if (chi.size() != 2) throw std::invalid_argument("check_weyl_invariance: n = 2 only");
  VerificationReport rep;
  rep.check = "weyl-invariance";
  rep.seed = cfg.seed;
  rep.samples = sample_count;
  rep.tolerance = 1e-5;
  rep.params["chi"] = ojson::array({chi[0], chi[1]});
  rep.params["nodes"] = cfg.node_count;

  Eigen::VectorXd wchi(2);  // nontrivial Weyl element swaps the coordinates
  wchi << chi[1], chi[0];

  Rng rng(cfg.seed);
  double worst = 0.0;
  for (long i = 0; i < sample_count; ++i) {
    double t = rng.uniform(0.0, 3.0);
    Eigen::Matrix2d a = Eigen::Vector2d(t, -t).array().exp().matrix().asDiagonal();
    Eigen::Matrix2d g = so2(rng.uniform(0, 2 * M_PI)) * a * so2(rng.uniform(0, 2 * M_PI));
    auto ge = matgroup::GroupElement::from_matrix(g, 1e-6);
    double a1 = spherical(chi, ge, cfg);
    double a2 = spherical(wchi, ge, cfg);
    worst = std::max(worst, std::abs(a1 - a2) / a1);
  }
  rep.observed_min = 0.0;
  rep.observed_max = worst;
  rep.pass = worst <= rep.tolerance;
  return rep;
}

VerificationReport check_spherical_bounds(const Eigen::VectorXd& chi,
                                          const matgroup::CartanVector& ray, double t_max,
                                          const QuadratureConfig& cfg) {
  cfg.validate();
  const int n = ray.dim();
  if (n != 2) throw std::invalid_argument("check_spherical_bounds: n = 2 only");
  if (chi.size() != n) throw std::invalid_argument("check_spherical_bounds: chi dimension mismatch");
  if (!(chi[0] >= chi[1])) throw std::invalid_argument("check_spherical_bounds: chi must be dominant");
  if (!ray.is_dominant() || !(ray.coords()[0] > ray.coords()[1]))
    throw std::invalid_argument("check_spherical_bounds: ray must be interior dominant");

  VerificationReport rep;
  rep.check = "spherical-bounds";
  rep.seed = cfg.seed;
  rep.tolerance = 1e-6;
  rep.params["chi"] = ojson::array({chi[0], chi[1]});
  rep.params["t_max"] = t_max;
  rep.params["nodes"] = cfg.node_count;

  const Eigen::VectorXd rho = rho_covector(n);
  const Eigen::VectorXd chi_minus_rho = chi - rho;
  const int grid = 32;
  double qmin = std::numeric_limits<double>::infinity();
  double qmax = 0.0;
  std::vector<double> log_ts, log_qs;
  for (int i = 0; i <= grid; ++i) {
    double t = t_max * static_cast<double>(i) / grid;
    Eigen::VectorXd x = t * ray.coords();
    auto a = matgroup::GroupElement::from_matrix(diag_exp(x), 1e-6);
    double xi = spherical(chi, a, cfg);
    double q = xi * std::exp(-covector_dot(chi_minus_rho, x));
    rep.series.emplace_back(t, q);
    qmin = std::min(qmin, q);
    qmax = std::max(qmax, q);
    if (t >= 2.0 && t > 0.0) {
      log_ts.push_back(std::log(t));
      log_qs.push_back(std::log(std::max(q, 1e-300)));
    }
  }
  rep.observed_min = qmin;
  rep.observed_max = qmax;

  // Fitted polynomial degree of the upper-bound ratio on [2, t_max].
  double degree = 0.0;
  if (log_ts.size() >= 2) {
    double mx = std::accumulate(log_ts.begin(), log_ts.end(), 0.0) / log_ts.size();
    double my = std::accumulate(log_qs.begin(), log_qs.end(), 0.0) / log_qs.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < log_ts.size(); ++i) {
      sxx += (log_ts[i] - mx) * (log_ts[i] - mx);
      sxy += (log_ts[i] - mx) * (log_qs[i] - my);
    }
    degree = sxx > 0 ? sxy / sxx : 0.0;
  }
  const double rank = 1.0;
  rep.details["fitted_degree"] = degree;
  rep.details["degree_bound"] = rank + 1.0;
  bool lower_ok = qmin >= 1.0 - rep.tolerance;
  bool degree_ok = degree <= rank + 1.0;
  rep.details["lower_bound_ok"] = lower_ok;
  rep.details["degree_ok"] = degree_ok;
  rep.pass = lower_ok && degree_ok;
  return rep;
}

namespace {

struct ChartRanges {
  double s_max, x_max, u_max, v_max;
};

// Supports of the haar_crosscheck test functions have to die inside these
// chart windows; checked on the boundary below.
constexpr ChartRanges kRanges{1.6, 1.3, 3.0, 3.0};

double integrate_kak(const TestFunction& f, long n_phi, long n_s) {
  double acc = 0.0;
  double ds = kRanges.s_max / static_cast<double>(n_s);
  for (long i = 0; i < n_s; ++i) {
    double s = ds * (static_cast<double>(i) + 0.5);
    double dens = std::sinh(2.0 * s);
    Eigen::Matrix2d a = Eigen::Vector2d(s, -s).array().exp().matrix().asDiagonal();
    double sub = 0.0;
    for (long p = 0; p < n_phi; ++p) {
      double phi1 = 2.0 * M_PI * static_cast<double>(p) / static_cast<double>(n_phi);
      Eigen::Matrix2d left = so2(phi1) * a;
      for (long q = 0; q < n_phi; ++q) {
        double phi2 = 2.0 * M_PI * static_cast<double>(q) / static_cast<double>(n_phi);
        sub += f(left * so2(phi2));
      }
    }
    acc += dens * sub * ds;
  }
  return acc / (static_cast<double>(n_phi) * static_cast<double>(n_phi));
}

double integrate_iwasawa(const TestFunction& f, long n_phi, long n_x, long n_u) {
  double acc = 0.0;
  double dx = 2.0 * kRanges.x_max / n_x;
  double du = 2.0 * kRanges.u_max / n_u;
  for (int msign = 0; msign < 2; ++msign) {
    double m = msign == 0 ? 1.0 : -1.0;
    for (long i = 0; i < n_x; ++i) {
      double x = -kRanges.x_max + dx * (i + 0.5);
      double weight = std::exp(2.0 * x);
      Eigen::Matrix2d a = Eigen::Vector2d(x, -x).array().exp().matrix().asDiagonal();
      for (long j = 0; j < n_u; ++j) {
        double u = -kRanges.u_max + du * (j + 0.5);
        Eigen::Matrix2d nu;
        nu << 1, u, 0, 1;
        Eigen::Matrix2d p = m * (a * nu);
        double sub = 0.0;
        for (long q = 0; q < n_phi; ++q) {
          double phi = 2.0 * M_PI * static_cast<double>(q) / static_cast<double>(n_phi);
          sub += f(so2(phi) * p);
        }
        acc += weight * sub * dx * du;
      }
    }
  }
  return acc / static_cast<double>(n_phi);
}

double integrate_bruhat(const TestFunction& f, long n_v, long n_x, long n_u) {
  double acc = 0.0;
  double dv = 2.0 * kRanges.v_max / n_v;
  double dx = 2.0 * kRanges.x_max / n_x;
  double du = 2.0 * kRanges.u_max / n_u;
  for (int msign = 0; msign < 2; ++msign) {
    double m = msign == 0 ? 1.0 : -1.0;
    for (long i = 0; i < n_v; ++i) {
      double v = -kRanges.v_max + dv * (i + 0.5);
      Eigen::Matrix2d nbar;
      nbar << 1, 0, v, 1;
      for (long j = 0; j < n_x; ++j) {
        double x = -kRanges.x_max + dx * (j + 0.5);
        double weight = std::exp(2.0 * x);
        Eigen::Matrix2d na = nbar * Eigen::Vector2d(x, -x).array().exp().matrix().asDiagonal();
        for (long k = 0; k < n_u; ++k) {
          double u = -kRanges.u_max + du * (k + 0.5);
          Eigen::Matrix2d nu;
          nu << 1, u, 0, 1;
          acc += weight * f(m * (na * nu)) * dv * dx * du;
        }
      }
    }
  }
  return acc;
}

// max |f| on the boundary shells of all three charts; a nonzero value means
// the fixed chart windows truncate the support.
double boundary_leak(const TestFunction& f) {
  double leak = 0.0;
  for (double phi = 0; phi < 2 * M_PI; phi += 0.1) {
    Eigen::Matrix2d a = Eigen::Vector2d(kRanges.s_max, -kRanges.s_max).array().exp().matrix().asDiagonal();
    leak = std::max(leak, std::abs(f(so2(phi) * a * so2(phi * 1.7))));
    for (double w = -1.0; w <= 1.0; w += 0.25) {
      Eigen::Matrix2d nu, nb;
      nu << 1, kRanges.u_max, 0, 1;
      nb << 1, 0, w * kRanges.v_max, 1;
      Eigen::Matrix2d ax = Eigen::Vector2d(w * kRanges.x_max, -w * kRanges.x_max).array().exp().matrix().asDiagonal();
      leak = std::max(leak, std::abs(f(so2(phi) * ax * nu)));
      leak = std::max(leak, std::abs(f(nb * ax * nu)));
      Eigen::Matrix2d axb = Eigen::Vector2d(kRanges.x_max, -kRanges.x_max).array().exp().matrix().asDiagonal();
      leak = std::max(leak, std::abs(f(so2(phi) * axb * nb.transpose())));
    }
  }
  return leak;
}

}  // namespace

VerificationReport haar_crosscheck(const std::vector<TestFunction>& test_fns,
                                   const QuadratureConfig& cfg) {
  cfg.validate();
  if (test_fns.size() < 2)
    throw std::invalid_argument("haar_crosscheck: need at least two test functions");

  VerificationReport rep;
  rep.check = "haar-crosscheck";
  rep.seed = cfg.seed;
  rep.tolerance = 0.01;
  rep.params["functions"] = static_cast<long>(test_fns.size());
  rep.params["nodes"] = cfg.node_count;

  const long n_phi = std::max<long>(64, cfg.node_count / 16);
  const long n_mid = std::max<long>(64, cfg.node_count / 16);

  for (const auto& f : test_fns)
    if (boundary_leak(f) > 1e-12)
      throw std::invalid_argument("haar_crosscheck: test function not supported inside the chart windows");

  std::vector<double> kak, iwa, bru;
  for (const auto& f : test_fns) {
    kak.push_back(integrate_kak(f, n_phi, n_mid));
    iwa.push_back(integrate_iwasawa(f, n_phi, n_mid, n_mid));
    bru.push_back(integrate_bruhat(f, n_mid, n_mid, n_mid));
  }
  if (kak[0] <= 0 || iwa[0] <= 0 || bru[0] <= 0)
    throw std::invalid_argument("haar_crosscheck: calibration function must have positive integral");

  const double c_iwa = kak[0] / iwa[0];
  const double c_bru = kak[0] / bru[0];
  rep.details["calibration_iwasawa"] = c_iwa;
  rep.details["calibration_bruhat"] = c_bru;

  double worst = 0.0;
  ojson rows = ojson::array();
  for (size_t i = 1; i < test_fns.size(); ++i) {
    double ref = kak[i];
    double d_iwa = std::abs(c_iwa * iwa[i] - ref) / std::abs(ref);
    double d_bru = std::abs(c_bru * bru[i] - ref) / std::abs(ref);
    worst = std::max({worst, d_iwa, d_bru});
    ojson row;
    row["kak"] = kak[i];
    row["iwasawa_calibrated"] = c_iwa * iwa[i];
    row["bruhat_calibrated"] = c_bru * bru[i];
    rows.push_back(row);
  }
  rep.details["integrals"] = rows;
  rep.observed_max = worst;
  rep.pass = worst <= rep.tolerance;
  rep.samples = n_phi * n_mid * n_mid;
  return rep;
}

VerificationReport volume_decay_conjugation(const matgroup::ChartBox& box,
                                            const matgroup::CartanVector& ray, double t_max,
                                            const QuadratureConfig& cfg) {
  cfg.validate();
  if (box.n != 2) throw std::invalid_argument("volume_decay_conjugation: n = 2 only");
  if (!ray.is_dominant() || !(ray.coords()[0] > 0))
    throw std::invalid_argument("volume_decay_conjugation: ray must be interior dominant");

  VerificationReport rep;
  rep.check = "volume-decay";
  rep.seed = cfg.seed;
  rep.samples = cfg.mc_samples;
  rep.params["t_max"] = t_max;
  rep.params["ray"] = ojson::array({ray.coords()[0], ray.coords()[1]});

  const Eigen::VectorXd rho = rho_covector(2);
  const int grid = 32;
  const long per_t = std::max<long>(1000, cfg.mc_samples / (grid + 1));
  double plateau_acc = 0.0;
  int plateau_n = 0;
  double max_norm = 0.0, min_norm = std::numeric_limits<double>::infinity();
  double max_stderr = 0.0;

  for (int i = 0; i <= grid; ++i) {
    double t = t_max * static_cast<double>(i) / grid;
    double lam = t * ray.coords()[0];  // conjugation scales v by e^{2 lam}
    // x in a B a^{-1}  iff  (v e^{2 lam}, x, u e^{-2 lam}) stays in the box;
    // sample v directly from the shrunken admissible range.
    matgroup::ChartBox shrunk = box;
    shrunk.lo[0] = std::max(box.lo[0], box.lo[0] * std::exp(-2.0 * lam));
    shrunk.hi[0] = std::min(box.hi[0], box.hi[0] * std::exp(-2.0 * lam));
    if (!(shrunk.lo[0] < shrunk.hi[0])) {
      rep.series.emplace_back(t, 0.0);
      continue;
    }
    auto samples = matgroup::sample_box(shrunk, per_t, cfg.seed + 7919ULL * i);
    double acc = 0.0, acc2 = 0.0;
    for (const auto& w : samples) {
      double u_conj = w.params[2] * std::exp(-2.0 * lam);
      bool inside = u_conj >= box.lo[2] && u_conj <= box.hi[2];
      // v-condition holds by construction of the shrunken range
      double val = inside ? w.weight : 0.0;
      acc += val;
      acc2 += val * val;
    }
    double mean = acc / per_t;
    double se = std::sqrt(std::max(0.0, acc2 / per_t - mean * mean) / per_t);
    double norm = mean * std::exp(2.0 * covector_dot(rho, t * ray.coords()));
    double norm_se = se * std::exp(2.0 * covector_dot(rho, t * ray.coords()));
    rep.series.emplace_back(t, norm);
    max_norm = std::max(max_norm, norm);
    min_norm = std::min(min_norm, norm);
    max_stderr = std::max(max_stderr, norm_se);
    if (t <= t_max / 8.0) {
      plateau_acc += norm;
      ++plateau_n;
    }
  }
  double plateau = plateau_n > 0 ? plateau_acc / plateau_n : 0.0;
  rep.observed_min = min_norm;
  rep.observed_max = max_norm;
  rep.tolerance = 3.0;
  rep.details["plateau"] = plateau;
  rep.details["max_stderr"] = max_stderr;
  rep.pass = max_norm <= 3.0 * plateau + 3.0 * max_stderr;
  return rep;
}

VerificationReport volume_growth_bgb(const matgroup::CartanVector& ray, double t_max, double radius,
                                     const QuadratureConfig& cfg) {
  cfg.validate();
  if (ray.dim() != 2) throw std::invalid_argument("volume_growth_bgb: n = 2 only");
  if (!ray.is_dominant() || !(ray.coords()[0] > 0))
    throw std::invalid_argument("volume_growth_bgb: ray must be interior dominant");
  if (!(radius > 0)) throw std::invalid_argument("volume_growth_bgb: radius must be positive");

  VerificationReport rep;
  rep.check = "volume-growth";
  rep.seed = cfg.seed;
  rep.params["t_max"] = t_max;
  rep.params["radius"] = radius;
  rep.tolerance = 50.0;

  // Inner Bruhat box: the largest eps-cube in (v, x, u) with kappa-norm
  // staying inside the K e^{a(radius)} K ball.
  double eps = 0.0;
  for (double cand = 0.45 * radius; cand > 0.01 * radius; cand *= 0.85) {
    double worst = 0.0;
    const int gridn = 7;
    for (int a = 0; a < gridn && worst <= radius; ++a)
      for (int b = 0; b < gridn && worst <= radius; ++b)
        for (int c = 0; c < gridn; ++c) {
          Eigen::Vector3d p(-cand + 2 * cand * a / (gridn - 1.0),
                            -cand + 2 * cand * b / (gridn - 1.0),
                            -cand + 2 * cand * c / (gridn - 1.0));
          auto g = matgroup::chart_point(2, p);
          worst = std::max(worst, matgroup::cartan_projection(g).norm());
          if (worst > radius) break;
        }
    if (worst <= radius) {
      eps = cand;
      break;
    }
  }
  if (eps == 0.0)
    throw std::invalid_argument("volume_growth_bgb: radius too small for a nonempty inner Bruhat box");
  rep.details["inner_box_halfwidth"] = eps;

  // Bruhat-normalized inner bound constant; e^{2 rho(t ray)} carries the
  // growth. The Iwasawa x-integral of e^{2x} over [-eps, eps]:
  double inner_const = (2 * eps) * ((std::exp(2 * eps) - std::exp(-2 * eps)) / 2.0) * (2 * eps);

  // Calibrate Bruhat units against KAK units on a reference bump.
  TestFunction bump = [](const Eigen::Matrix2d& g) {
    double d2 = (g - Eigen::Matrix2d::Identity()).squaredNorm();
    double r2 = 0.35 * 0.35;
    return d2 < r2 ? (r2 - d2) * (r2 - d2) : 0.0;
  };
  const long n_cal = std::max<long>(48, cfg.node_count / 32);
  double lam_cal = integrate_kak(bump, n_cal, n_cal) / integrate_bruhat(bump, n_cal, n_cal, n_cal);
  rep.details["bruhat_to_kak"] = lam_cal;

  const Eigen::VectorXd rho = rho_covector(2);
  const double shift = std::sqrt(2.0) * radius;  // a(2 radius) ball in the s line
  const int grid = 32;
  double in_min = std::numeric_limits<double>::infinity(), in_max = 0.0;
  double out_min = std::numeric_limits<double>::infinity(), out_max = 0.0;
  bool inner_le_outer = true;
  ojson rows = ojson::array();
  for (int i = 0; i <= grid; ++i) {
    double t = t_max * static_cast<double>(i) / grid;
    double center = t * ray.coords()[0];
    double lo = std::max(0.0, center - shift), hi = center + shift;
    double outer = (std::cosh(2 * hi) - std::cosh(2 * lo)) / 2.0;
    double e2rho = std::exp(2.0 * covector_dot(rho, t * ray.coords()));
    double inner = lam_cal * inner_const * e2rho;
    double no = outer / e2rho, ni = inner / e2rho;
    rep.series.emplace_back(t, no);
    in_min = std::min(in_min, ni);
    in_max = std::max(in_max, ni);
    out_min = std::min(out_min, no);
    out_max = std::max(out_max, no);
    if (inner > outer * (1 + 1e-9)) inner_le_outer = false;
    ojson row;
    row["t"] = t;
    row["outer_normalized"] = no;
    row["inner_normalized"] = ni;
    rows.push_back(row);
  }
  rep.details["rows"] = rows;
  rep.details["inner_le_outer"] = inner_le_outer;
  rep.details["outer_window"] = out_max / out_min;
  rep.details["inner_window"] = in_max / in_min;
  rep.observed_min = std::min(in_min, out_min);
  rep.observed_max = std::max(in_max, out_max);
  rep.pass = inner_le_outer && out_max / out_min <= 50.0 && in_max / in_min <= 50.0;
  return rep;
}

namespace {

struct HNode {
  Eigen::MatrixXd h_inv;
  double weight;
};

// Truncated quadrature/summation node sets over the subgroup, with the
// symmetric measure (Haar for these unimodular variants, counting measure
// for discrete ones).
std::vector<HNode> h_nodes_for(const matgroup::SubgroupSpec& spec, double t_max,
                               const matgroup::ChartBox& box, const QuadratureConfig& cfg) {
  const int n = spec.n;
  std::vector<HNode> nodes;
  if (std::holds_alternative<matgroup::DiagonalTorus>(spec.variant)) {
    const double y_max = t_max + 3.0;
    if (n == 2) {
      const long m = 1024;
      const double dy = 2 * y_max / m;
      for (long i = 0; i < m; ++i) {
        double y = -y_max + dy * (i + 0.5);
        nodes.push_back({Eigen::Vector2d(-y, y).array().exp().matrix().asDiagonal(), dy});
      }
    } else {
      const long m = 72;
      const double dy = 2 * y_max / m;
      for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j) {
          double y1 = -y_max + dy * (i + 0.5);
          double y2 = -y_max + dy * (j + 0.5);
          nodes.push_back(
              {Eigen::Vector3d(-y1, -y2, y1 + y2).array().exp().matrix().asDiagonal(), dy * dy});
        }
    }
    return nodes;
  }
  if (std::holds_alternative<matgroup::UpperUnipotent>(spec.variant)) {
    // The A-ray window only meets H near the box's own unipotent extent.
    const double u_max = 2.0 * box.hi.tail(n * (n - 1) / 2).cwiseAbs().maxCoeff() + 2.0;
    if (n == 2) {
      const long m = 1024;
      const double du = 2 * u_max / m;
      for (long i = 0; i < m; ++i) {
        double u = -u_max + du * (i + 0.5);
        Eigen::Matrix2d h;
        h << 1, -u, 0, 1;
        nodes.push_back({h, du});
      }
    } else {
      const long m = 24;
      const double du = 2 * u_max / m;
      for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
          for (long k = 0; k < m; ++k) {
            Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
            h(0, 1) = -u_max + du * (i + 0.5);
            h(0, 2) = -u_max + du * (j + 0.5);
            h(1, 2) = -u_max + du * (k + 0.5);
            nodes.push_back({h.inverse(), du * du * du});
          }
    }
    return nodes;
  }
  if (const auto* br = std::get_if<matgroup::BlockReductive>(&spec.variant)) {
    if (br->sizes.size() != 1 || br->sizes[0] != 2)
      throw std::invalid_argument("estimate_theta_ray: only a single SL(2) block is supported here");
    const int p = br->positions[0];
    const double y_max = t_max / 2.0 + 2.5;
    const long m_ang = 12, m_rad = 96;
    const double dy = y_max / m_rad;
    for (long a = 0; a < m_ang; ++a)
      for (long r = 0; r < m_rad; ++r)
        for (long b = 0; b < m_ang; ++b) {
          double phi1 = 2.0 * M_PI * a / m_ang, phi2 = 2.0 * M_PI * b / m_ang;
          double y = dy * (r + 0.5);
          Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
          Eigen::Matrix2d blk = so2(phi1) * Eigen::Vector2d(y, -y).array().exp().matrix().asDiagonal() * so2(phi2);
          h.block(p, p, 2, 2) = blk.inverse();
          double w = std::sinh(2 * y) * dy / (m_ang * static_cast<double>(m_ang));
          nodes.push_back({h, w});
        }
    return nodes;
  }
  if (std::holds_alternative<matgroup::DiscreteGenerators>(spec.variant)) {
    // enough depth that orbit s-values cover the coefficient window
    const int depth = std::min(14, 2 + static_cast<int>(t_max));
    auto ball = delta_estimator::enumerate_ball(spec, depth);
    for (const auto& e : ball.elements()) nodes.push_back({e.g.inverse().mat(), 1.0});
    return nodes;
  }
  throw std::invalid_argument("estimate_theta_ray: unsupported subgroup variant");
}

}  // namespace

ThetaEstimate estimate_theta_ray(const matgroup::SubgroupSpec& h_spec,
                                 const matgroup::CartanVector& ray, double t_max,
                                 const matgroup::ChartBox& box, const QuadratureConfig& cfg) {
  cfg.validate();
  const int n = h_spec.n;
  if (n != 2 && n != 3) throw std::invalid_argument("estimate_theta_ray: n must be 2 or 3");
  if (ray.dim() != n || box.n != n)
    throw std::invalid_argument("estimate_theta_ray: dimension mismatch");
  if (!ray.is_dominant() || !(ray.coords()[0] > ray.coords()[n - 1]))
    throw std::invalid_argument("estimate_theta_ray: ray must be dominant nonzero");

  const Eigen::VectorXd rho = rho_covector(n);
  const double two_rho_ray = 2.0 * covector_dot(rho, ray.coords());

  // Fixed sample set shared by every (t, h): correlated estimates make the
  // fitted slope far more stable than independent draws would. Uniform
  // sampling keeps the far A-tail of the box populated, which is where the
  // coefficient mass sits for large t.
  const long n_samples = std::min<long>(cfg.mc_samples, n == 2 ? 8192 : 4096);
  auto samples = matgroup::sample_box(box, n_samples, cfg.seed, matgroup::Sampling::kUniform);
  auto nodes = h_nodes_for(h_spec, t_max, box, cfg);

  ThetaEstimate est;
  est.two_rho_ray = two_rho_ray;
  est.details["h_nodes"] = static_cast<long>(nodes.size());
  est.details["mc_samples"] = n_samples;
  est.details["seed"] = cfg.seed;

  const int grid = 12;
  std::vector<double> ts, logs;
  for (int i = 0; i <= grid; ++i) {
    double t = t_max * (0.2 + 0.8 * static_cast<double>(i) / grid);
    Eigen::MatrixXd a = diag_exp(t * ray.coords());
    // z_i = a_t y_i once per t
    std::vector<Eigen::MatrixXd> z;
    z.reserve(samples.size());
    for (const auto& w : samples) z.push_back(a * w.g.mat());
    // Per-node contributions land in their own slots and are summed in node
    // order afterwards, so the result does not depend on the worker count.
    std::vector<double> contrib(nodes.size(), 0.0);
    parallel_for(static_cast<long>(nodes.size()), [&](long ni) {
      const auto& node = nodes[static_cast<size_t>(ni)];
      double hits = 0.0;
      for (size_t si = 0; si < z.size(); ++si)
        if (matgroup::chart_contains(box, z[si] * node.h_inv)) hits += samples[si].weight;
      contrib[static_cast<size_t>(ni)] = node.weight * hits / static_cast<double>(n_samples);
    });
    double c = 0.0;
    for (double v : contrib) c += v;
    est.c_values.emplace_back(t, c);
    if (c > 0.0) {
      ts.push_back(t);
      logs.push_back(std::log(c));
    }
  }

  // Fit on the upper half of the grid.
  std::vector<double> fx, fy;
  for (size_t i = 0; i < ts.size(); ++i)
    if (ts[i] >= t_max * 0.6) {
      fx.push_back(ts[i]);
      fy.push_back(logs[i]);
    }
  if (fx.size() < 3) throw std::runtime_error("estimate_theta_ray: too few positive c(t) values to fit");
  double mx = std::accumulate(fx.begin(), fx.end(), 0.0) / fx.size();
  double my = std::accumulate(fy.begin(), fy.end(), 0.0) / fy.size();
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < fx.size(); ++i) {
    sxx += (fx[i] - mx) * (fx[i] - mx);
    sxy += (fx[i] - mx) * (fy[i] - my);
  }
  double slope = sxy / sxx;
  double sse = 0;
  for (size_t i = 0; i < fx.size(); ++i) {
    double r = fy[i] - (my + slope * (fx[i] - mx));
    sse += r * r;
  }
  est.fit_residual = std::sqrt(sse / fx.size());
  est.theta_hat = 1.0 + slope / two_rho_ray;

  // Sanity: c positive and nonincreasing on the fitted window, up to noise.
  est.sane = true;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [t, c] : est.c_values) {
    if (t < t_max * 0.6) continue;
    if (!(c > 0.0) || c > prev * 1.25) est.sane = false;
    prev = c;
  }
  return est;
}

}  // namespace temperlab::harmonic_verify
