#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "temperlab/harmonic_verify.hpp"
#include "temperlab/rng.hpp"

using namespace temperlab;
using namespace temperlab::harmonic_verify;
using matgroup::CartanVector;
using matgroup::ChartBox;
using matgroup::GroupElement;

namespace {

QuadratureConfig quick_cfg() {
  QuadratureConfig cfg;
  cfg.node_count = 512;
  cfg.mc_samples = 20000;
  cfg.seed = 5;
  return cfg;
}

GroupElement a_t(double t) {
  Eigen::Matrix2d a = Eigen::Vector2d(t, -t).array().exp().matrix().asDiagonal();
  return GroupElement::from_matrix(a, 1e-9);
}

Eigen::VectorXd chi_of(double c) {
  // multiples of rho = (1/2, -1/2)
  Eigen::VectorXd chi(2);
  chi << c / 2.0, -c / 2.0;
  return chi;
}

}  // namespace

TEST_CASE("spherical function basics") {
  auto cfg = quick_cfg();
  // Xi_chi(e) = 1 for any chi
  for (double c : {0.0, 0.5, 1.0, 2.3})
    CHECK(spherical(chi_of(c), GroupElement::identity(2), cfg) == doctest::Approx(1.0).epsilon(1e-9));

  // Xi_chi(k) = 1 on rotations
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    auto k = GroupElement::from_matrix(matgroup::random_rotation(2, rng), 1e-9);
    CHECK(spherical(chi_of(0.7), k, cfg) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // chi = rho: Xi_rho is identically 1 (the Poisson-kernel normalization)
  for (double t : {0.0, 1.0, 3.0, 8.0})
    CHECK(spherical(chi_of(1.0), a_t(t), quick_cfg()) == doctest::Approx(1.0).epsilon(1e-7));

  // n = 3: identity still integrates to 1, deterministically in the seed
  auto id3 = GroupElement::identity(3);
  Eigen::VectorXd chi3 = Eigen::VectorXd::Zero(3);
  QuadratureConfig cfg3 = quick_cfg();
  cfg3.mc_samples = 500;
  CHECK(spherical(chi3, id3, cfg3) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spherical(chi3, id3, cfg3) == spherical(chi3, id3, cfg3));

  CHECK_THROWS_AS(spherical(Eigen::VectorXd::Zero(4), GroupElement::identity(4), cfg),
                  std::invalid_argument);
  QuadratureConfig bad = cfg;
  bad.node_count = 4;
  CHECK_THROWS_AS(spherical(chi_of(0), GroupElement::identity(2), bad), std::invalid_argument);
}

TEST_CASE("spherical quadrature converges as nodes double") {
  auto g = a_t(2.0);
  QuadratureConfig c1 = quick_cfg(), c2 = quick_cfg(), c3 = quick_cfg();
  c1.node_count = 64;
  c2.node_count = 128;
  c3.node_count = 4096;
  double ref = spherical(chi_of(0.3), g, c3);
  double e1 = std::abs(spherical(chi_of(0.3), g, c1) - ref);
  double e2 = std::abs(spherical(chi_of(0.3), g, c2) - ref);
  CHECK(e2 <= e1 + 1e-14);
}

TEST_CASE("weyl invariance") {
  auto cfg = quick_cfg();
  cfg.node_count = 2048;

  // chi = 0: identical functions, discrepancy exactly zero
  auto rep0 = check_weyl_invariance(chi_of(0.0), 8, cfg);
  CHECK(rep0.observed_max == 0.0);
  CHECK(rep0.pass);

  // chi = 0.3 rho
  auto rep = check_weyl_invariance(chi_of(0.3), 16, cfg);
  CHECK(rep.pass);
  CHECK(rep.observed_max <= 1e-5);

  // discrepancy at g = a_2 against a doubled-node oracle
  QuadratureConfig dbl = cfg;
  dbl.node_count = 4096;
  double d1 = std::abs(spherical(chi_of(0.3), a_t(2.0), cfg) - spherical(chi_of(-0.3), a_t(2.0), cfg));
  double d2 = std::abs(spherical(chi_of(0.3), a_t(2.0), dbl) - spherical(chi_of(-0.3), a_t(2.0), dbl));
  CHECK(d1 <= 2e-5);
  CHECK(d2 <= d1 + 1e-12);
}

TEST_CASE("spherical bounds along the chamber ray") {
  auto cfg = quick_cfg();
  cfg.node_count = 1024;
  CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1, -1))};

  auto rep0 = check_spherical_bounds(chi_of(0.0), ray, 10.0, cfg);
  CHECK(rep0.pass);
  CHECK(rep0.series.front().second == doctest::Approx(1.0).epsilon(1e-9));  // q(0) = 1
  CHECK(rep0.observed_min >= 1.0 - 1e-6);
  // rank-one: the polynomial factor is degree one
  CHECK(rep0.details["fitted_degree"].get<double>() <= 2.0);
  CHECK(rep0.details["fitted_degree"].get<double>() >= 0.5);

  auto rep_half = check_spherical_bounds(chi_of(0.5), ray, 10.0, cfg);
  CHECK(rep_half.pass);
  CHECK(rep_half.observed_max < 10.0);  // bounded ratio for interior chi

  CHECK_THROWS_AS(check_spherical_bounds(chi_of(-0.5), ray, 10.0, cfg), std::invalid_argument);
  CartanVector wall{Eigen::VectorXd(Eigen::Vector2d(0, 0))};
  CHECK_THROWS_AS(check_spherical_bounds(chi_of(0.5), wall, 10.0, cfg), std::invalid_argument);
}

namespace {

TestFunction bump_at(const Eigen::Matrix2d& center, double radius) {
  return [center, radius](const Eigen::Matrix2d& g) {
    double d2 = (g - center).squaredNorm();
    double r2 = radius * radius;
    return d2 < r2 ? (r2 - d2) * (r2 - d2) * (r2 - d2) : 0.0;
  };
}

}  // namespace

TEST_CASE("haar crosscheck across the three coordinate systems") {
  auto cfg = quick_cfg();
  cfg.node_count = 2048;

  Eigen::Matrix2d c1 = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d c2;
  c2 << 1.05, 0.12, -0.08, (1.0 + 0.12 * -0.08) / 1.05;

  // same function in both slots: self-calibration makes ratios exactly one
  auto self = haar_crosscheck({bump_at(c1, 0.3), bump_at(c1, 0.3)}, cfg);
  CHECK(self.pass);
  CHECK(self.observed_max <= 1e-12);

  // bump vs shifted bump
  auto rep = haar_crosscheck({bump_at(c1, 0.3), bump_at(c2, 0.25)}, cfg);
  CHECK(rep.pass);
  CHECK(rep.observed_max <= 0.01);

  // scaling a function by 7 scales all three integrals by 7
  auto f = bump_at(c2, 0.25);
  TestFunction f7 = [f](const Eigen::Matrix2d& g) { return 7.0 * f(g); };
  auto rep7 = haar_crosscheck({bump_at(c1, 0.3), f, f7}, cfg);
  REQUIRE(rep7.details["integrals"].size() == 2);
  double k1 = rep7.details["integrals"][0]["kak"].get<double>();
  double k7 = rep7.details["integrals"][1]["kak"].get<double>();
  CHECK(k7 == doctest::Approx(7.0 * k1).epsilon(1e-12));

  CHECK_THROWS_AS(haar_crosscheck({bump_at(c1, 0.3)}, cfg), std::invalid_argument);
  // support leaking out of the chart windows is rejected
  CHECK_THROWS_AS(haar_crosscheck({bump_at(c1, 8.0), bump_at(c1, 0.3)}, cfg), std::invalid_argument);
}

TEST_CASE("haar crosscheck against dense-grid oracle") {
  // The KAK integral of a bump, against an independent dense midpoint grid.
  auto f = bump_at(Eigen::Matrix2d::Identity(), 0.3);
  double lib = 0.0;
  {
    auto cfg = quick_cfg();
    cfg.node_count = 4096;
    auto rep = haar_crosscheck({f, f}, cfg);
    // calibration constants are reported; recompute the raw KAK integral
    lib = rep.details["integrals"][0]["kak"].get<double>();
  }
  double oracle = oracles::grid_quadrature(
      {{0.0, 2 * M_PI}, {0.0, 1.6}, {0.0, 2 * M_PI}}, 72, [&](const std::vector<double>& p) {
        Eigen::Matrix2d k1, k2, a;
        k1 << std::cos(p[0]), -std::sin(p[0]), std::sin(p[0]), std::cos(p[0]);
        k2 << std::cos(p[2]), -std::sin(p[2]), std::sin(p[2]), std::cos(p[2]);
        a << std::exp(p[1]), 0, 0, std::exp(-p[1]);
        return f(k1 * a * k2) * std::sinh(2.0 * p[1]);
      });
  oracle /= (2 * M_PI) * (2 * M_PI);
  CHECK(lib == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("volume decay under conjugation") {
  auto cfg = quick_cfg();
  cfg.mc_samples = 200000;
  auto box = ChartBox::cube(2, 0.5);
  CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1, -1))};
  auto rep = volume_decay_conjugation(box, ray, 6.0, cfg);
  CHECK(rep.pass);
  CHECK(rep.series.front().second > 0.0);
  // t = 0 reproduces the box Haar volume
  CHECK(rep.series.front().second == doctest::Approx(matgroup::box_haar_volume(box)).epsilon(1e-6));
  // determinism
  auto rep2 = volume_decay_conjugation(box, ray, 6.0, cfg);
  CHECK(rep.observed_max == rep2.observed_max);

  // membership symmetry of the indicator: x in aBa^{-1} iff a^{-1}xa in B
  auto samples = matgroup::sample_box(box, 100, 77);
  Eigen::Matrix2d a = Eigen::Vector2d(0.7, -0.7).array().exp().matrix().asDiagonal();
  for (const auto& w : samples) {
    bool direct = matgroup::chart_contains(box, a.inverse() * w.g.mat() * a);
    auto p = matgroup::chart_factor(w.g.mat());
    REQUIRE(p);
    Eigen::VectorXd q = *p;
    q[0] *= std::exp(2 * 0.7);
    q[2] *= std::exp(-2 * 0.7);
    bool via_coords = true;
    for (int i = 0; i < 3; ++i)
      if (q[i] < box.lo[i] - 1e-12 || q[i] > box.hi[i] + 1e-12) via_coords = false;
    CHECK(direct == via_coords);
  }
}

TEST_CASE("volume growth of K-bi-invariant double cosets") {
  auto cfg = quick_cfg();
  CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1, -1))};
  auto rep = volume_growth_bgb(ray, 8.0, 0.5, cfg);
  CHECK(rep.pass);
  CHECK(rep.details["inner_le_outer"].get<bool>());
  CHECK(rep.details["outer_window"].get<double>() <= 50.0);
  CHECK(rep.details["inner_window"].get<double>() <= 50.0);
  // both bounds positive at t = 0
  CHECK(rep.series.front().second > 0.0);

  CHECK_THROWS_AS(volume_growth_bgb(ray, 8.0, 0.0, cfg), std::invalid_argument);
}

TEST_CASE("theta estimator: trivial H decays at the full rate") {
  auto cfg = quick_cfg();
  cfg.mc_samples = 6000;
  cfg.seed = 11;
  ChartBox box = ChartBox::cube(2, 0.5);
  // wide A-extent so a_t B keeps meeting B out to t_max
  box.lo[1] = -4.5;
  box.hi[1] = 4.5;
  CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1, -1))};
  auto trivial = matgroup::SubgroupSpec::discrete(2, {GroupElement::identity(2)});
  auto est = estimate_theta_ray(trivial, ray, 5.0, box, cfg);
  CHECK(est.theta_hat <= 0.1);
  CHECK(est.theta_hat >= -0.1);
  CHECK(est.sane);
}

TEST_CASE("theta estimator: diagonal torus against a quadrature oracle" * doctest::timeout(280)) {
  // Independent oracle: c(t) for H = A computed by direct dense quadrature
  // of nu(a_t B cap B a_y) over y, with the inner volume in closed form in
  // chart coordinates (the chart integrals decouple).
  const double half = 0.5, xa = 4.5, t_max = 5.0;
  auto c_oracle = [&](double t) {
    // nu(a_t B cap B a_y) = int 1[|v e^{-2t}|<=half] dv
    //   * int_x e^{2x} 1[|x|<=xa, |t+x-y|<=xa] dx * int_u 1[|u|<=half, |u e^{2y}|<=half] du
    auto x_int = [&](double y) {
      double lo = std::max(-xa, y - t - xa), hi = std::min(xa, y - t + xa);
      if (lo >= hi) return 0.0;
      return (std::exp(2 * hi) - std::exp(2 * lo)) / 2.0;
    };
    auto u_int = [&](double y) {
      double cap = half * std::min(1.0, std::exp(-2 * y));
      return 2.0 * cap;
    };
    double acc = 0.0;
    const int m = 4000;
    const double ylo = -3.0, yhi = t + 3.0;
    for (int i = 0; i < m; ++i) {
      double y = ylo + (yhi - ylo) * (i + 0.5) / m;
      acc += 2.0 * half * x_int(y) * u_int(y);
    }
    return acc * (yhi - ylo) / m;
  };
  std::vector<double> ts, logs;
  for (int i = 0; i <= 12; ++i) {
    double t = t_max * (0.2 + 0.8 * i / 12.0);
    if (t >= t_max * 0.6) {
      ts.push_back(t);
      logs.push_back(std::log(c_oracle(t)));
    }
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < ts.size(); ++i) { mx += ts[i]; my += logs[i]; }
  mx /= ts.size();
  my /= ts.size();
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    sxx += (ts[i] - mx) * (ts[i] - mx);
    sxy += (ts[i] - mx) * (logs[i] - my);
  }
  double theta_oracle = 1.0 + (sxy / sxx) / 2.0;  // 2 rho(ray) = 2

  auto cfg = quick_cfg();
  cfg.mc_samples = 8192;
  cfg.seed = 13;
  ChartBox box = ChartBox::cube(2, half);
  box.lo[1] = -xa;
  box.hi[1] = xa;
  CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1, -1))};
  auto est = estimate_theta_ray(matgroup::SubgroupSpec::diagonal_torus(2), ray, t_max, box, cfg);
  MESSAGE("torus theta_hat = ", est.theta_hat, ", oracle = ", theta_oracle);
  CHECK(est.sane);
  CHECK(std::abs(est.theta_hat - theta_oracle) <= 0.1);

  // The coefficient values themselves track the oracle.
  for (const auto& [t, c] : est.c_values) {
    if (t < t_max * 0.6) continue;
    CHECK(c == doctest::Approx(c_oracle(t)).epsilon(0.25));
  }
}

TEST_CASE("theta estimator input guards") {
  auto cfg = quick_cfg();
  ChartBox box = ChartBox::cube(2, 0.5);
  CartanVector ray{Eigen::VectorXd(Eigen::Vector2d(1, -1))};
  CartanVector bad_ray{Eigen::VectorXd(Eigen::Vector2d(0, 0))};
  CHECK_THROWS_AS(estimate_theta_ray(matgroup::SubgroupSpec::diagonal_torus(2), bad_ray, 5.0, box, cfg),
                  std::invalid_argument);
  ChartBox box3 = ChartBox::cube(3, 0.5);
  CHECK_THROWS_AS(estimate_theta_ray(matgroup::SubgroupSpec::diagonal_torus(3), ray, 5.0, box, cfg),
                  std::invalid_argument);
  (void)box3;
}
