#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "temperlab/json_io.hpp"
#include "temperlab/matgroup.hpp"

namespace temperlab::harmonic_verify {

struct QuadratureConfig {
  long node_count = 2048;      // circle / grid nodes
  double truncation = 8.0;     // chart truncation radius where needed
  long mc_samples = 1'000'000; // Monte-Carlo sample budget
  uint64_t seed = 1;

  void validate() const;
};

struct VerificationReport {
  std::string check;
  ojson params;
  double observed_min = 0.0;
  double observed_max = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  uint64_t seed = 0;
  long samples = 0;
  ojson details;
  std::vector<std::pair<double, double>> series;  // (t, normalized value)

  ojson to_json() const;
  std::string to_csv() const;
};

// Spherical function: the K-average of exp(-(chi+rho) eta(g^{-1} k)).
// Deterministic circle quadrature for n = 2, Monte-Carlo over SO(3) for
// n = 3. chi is a covector in the n diagonal coordinates.
double spherical(const Eigen::VectorXd& chi, const matgroup::GroupElement& g,
                 const QuadratureConfig& cfg);

// n = 2: the nontrivial Weyl element sends chi to -chi; the two spherical
// functions must agree. Discrepancy is measured relative to Xi_chi.
VerificationReport check_weyl_invariance(const Eigen::VectorXd& chi, long sample_count,
                                         const QuadratureConfig& cfg);

// q(t) = Xi_chi(e^{t ray}) exp(-(chi - rho)(t ray)) must stay >= 1 - 1e-6
// and grow at most polynomially with degree <= rank + 1.
VerificationReport check_spherical_bounds(const Eigen::VectorXd& chi,
                                          const matgroup::CartanVector& ray, double t_max,
                                          const QuadratureConfig& cfg);

// Integrates the test functions in KAK, Iwasawa, and Bruhat coordinates,
// calibrating the three normalization constants on test_fns[0]; the rest
// must agree across coordinate systems within 1%.
using TestFunction = std::function<double(const Eigen::Matrix2d&)>;
VerificationReport haar_crosscheck(const std::vector<TestFunction>& test_fns,
                                   const QuadratureConfig& cfg);

// MC estimate of nu(a_t B a_t^{-1} cap B) e^{2 rho(t ray)} on a t grid; the
// normalized quantity must stay below 3x its small-t plateau.
VerificationReport volume_decay_conjugation(const matgroup::ChartBox& box,
                                            const matgroup::CartanVector& ray, double t_max,
                                            const QuadratureConfig& cfg);

// Outer KAK-shell bound and inner Bruhat-box bound for nu(B e^{t ray} B),
// both normalized by e^{2 rho(t ray)}; each must stay inside a factor-50
// window and the inner bound must not exceed the outer one.
VerificationReport volume_growth_bgb(const matgroup::CartanVector& ray, double t_max, double radius,
                                     const QuadratureConfig& cfg);

struct ThetaEstimate {
  double theta_hat = 0.0;
  double fit_residual = 0.0;
  double two_rho_ray = 0.0;
  bool sane = false;  // c(t) positive and nonincreasing on the fit window
  std::vector<std::pair<double, double>> c_values;  // (t, c(t))
  ojson details;
};

// Coefficient decay along e^{t ray}: c(t) = int_H nu(a_t B cap B h) dnu_H(h)
// with the inner volume by MC over the box and the H integral by
// quadrature over a truncated node set; fits log c(t) against
// 2 (theta - 1) rho(t ray) on the upper half of the grid.
ThetaEstimate estimate_theta_ray(const matgroup::SubgroupSpec& h_spec,
                                 const matgroup::CartanVector& ray, double t_max,
                                 const matgroup::ChartBox& box, const QuadratureConfig& cfg);

}  // namespace temperlab::harmonic_verify
