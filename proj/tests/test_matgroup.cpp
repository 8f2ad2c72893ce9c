#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "temperlab/matgroup.hpp"
#include "temperlab/rng.hpp"

using namespace temperlab;
using namespace temperlab::matgroup;

namespace {

GroupElement random_element(int n, Rng& rng, double spread = 1.0) {
  // k1 a k2 with log-diagonal drawn in [-spread, spread]
  Eigen::MatrixXd k1 = random_rotation(n, rng);
  Eigen::MatrixXd k2 = random_rotation(n, rng);
  Eigen::VectorXd x(n);
  double sum = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    x[i] = rng.uniform(-spread, spread);
    sum += x[i];
  }
  x[n - 1] = -sum;
  Eigen::MatrixXd a = x.array().exp().matrix().asDiagonal();
  return GroupElement::from_matrix(k1 * a * k2, 1e-6);
}

}  // namespace

TEST_CASE("group element construction guards") {
  CHECK_THROWS_AS(GroupElement::from_matrix(Eigen::Matrix2d::Identity() * 2.0), std::invalid_argument);
  CHECK_THROWS_AS(GroupElement::from_rational({{Rat(1), Rat(0)}, {Rat(0), Rat(2)}}),
                  std::invalid_argument);
  auto g = GroupElement::from_rational({{Rat(2), Rat(0)}, {Rat(0), Rat(1, 2)}});
  CHECK(g.exact());
  auto inv = g.inverse();
  CHECK(inv.rational()[0][0] == Rat(1, 2));
  CHECK(inv.rational()[1][1] == Rat(2));
  auto prod = g * inv;
  CHECK(prod.rational()[0][0] == Rat(1));
  CHECK(prod.rational()[0][1] == Rat(0));
}

TEST_CASE("cartan projection examples") {
  // identity and rotations project to zero
  auto kz = cartan_projection(GroupElement::identity(3));
  CHECK(kz.coords().cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  Rng rng(7);
  for (int i = 0; i < 5; ++i) {
    auto k = GroupElement::from_matrix(random_rotation(3, rng), 1e-9);
    CHECK(cartan_projection(k).coords().cwiseAbs().maxCoeff() < 1e-9);
  }

  // [[1,1],[0,1]] -> (log phi, -log phi), against the closed-form 2x2 oracle
  Eigen::Matrix2d shear;
  shear << 1, 1, 0, 1;
  auto kappa = cartan_projection(GroupElement::from_matrix(shear));
  auto [s1, s2] = oracles::singular_values_2x2(shear);
  const double log_phi = std::log((1.0 + std::sqrt(5.0)) / 2.0);
  CHECK(std::log(s1) == doctest::Approx(log_phi).epsilon(1e-12));
  CHECK(kappa.coords()[0] == doctest::Approx(log_phi).epsilon(1e-10));
  CHECK(kappa.coords()[1] == doctest::Approx(-log_phi).epsilon(1e-10));
  CHECK(kappa.coords()[0] == doctest::Approx(0.4812118250596).epsilon(1e-10));
  CHECK(kappa.is_dominant());
}

TEST_CASE("kappa inverse symmetry over 1000 random elements") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    int n = 2 + static_cast<int>(rng.below(3));
    auto g = random_element(n, rng, 2.0);
    auto k1 = cartan_projection(g);
    auto k2 = cartan_projection(g.inverse());
    auto expect = k1.reversed_negated();
    CHECK((k2.coords() - expect.coords()).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("kappa is K-bi-invariant") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    int n = 2 + static_cast<int>(rng.below(2));
    auto g = random_element(n, rng, 2.0);
    Eigen::MatrixXd k = random_rotation(n, rng);
    Eigen::MatrixXd kp = random_rotation(n, rng);
    auto a = cartan_projection(g);
    auto b = cartan_projection(GroupElement::from_matrix(k * g.mat() * kp, 1e-6));
    CHECK((a.coords() - b.coords()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("iwasawa projection examples and reconstruction") {
  auto ez = iwasawa_projection(GroupElement::identity(2));
  CHECK(ez.coords().cwiseAbs().maxCoeff() < 1e-12);

  auto d = iwasawa_projection(GroupElement::from_rational({{Rat(2), Rat(0)}, {Rat(0), Rat(1, 2)}}));
  CHECK(d.coords()[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // [[1,0],[1,1]]: hand Gram-Schmidt oracle gives (log sqrt 2, -log sqrt 2)
  Eigen::Matrix2d lower;
  lower << 1, 0, 1, 1;
  auto eta = iwasawa_projection(GroupElement::from_matrix(lower));
  auto [o1, o2] = oracles::gram_schmidt_eta_2x2(lower);
  CHECK(eta.coords()[0] == doctest::Approx(o1).epsilon(1e-12));
  CHECK(eta.coords()[1] == doctest::Approx(o2).epsilon(1e-12));
  CHECK(eta.coords()[0] == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

  // k a n reconstruction within 1e-9, and exp(eta) equals the triangular diagonal
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    int n = 2 + static_cast<int>(rng.below(3));
    auto g = random_element(n, rng, 1.5);
    auto f = iwasawa_factor(g);
    Eigen::MatrixXd a = f.eta.array().exp().matrix().asDiagonal();
    CHECK((f.k * a * f.nu - g.mat()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((f.k * f.k.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("compact perturbation of the cartan projection") {
  // B = chart ball of radius 0.5; the displacement of kappa under b g b' is
  // bounded by max ||kappa(b)|| + ||kappa(b')|| over the sampled pairs.
  const int n = 2;
  auto box = ChartBox::cube(n, 0.5);
  auto bs = sample_box(box, 200, 2024);
  Rng rng(21);
  double r_bound = 0.0;
  std::vector<double> b_norms;
  for (const auto& w : bs) b_norms.push_back(cartan_projection(w.g).norm());
  double sup_disp = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto& b = bs[rng.below(bs.size())];
    const auto& bp = bs[rng.below(bs.size())];
    auto g = random_element(n, rng, 3.0);
    auto kg = cartan_projection(g);
    auto kbg = cartan_projection(b.g * g * bp.g);
    double disp = (kbg.coords() - kg.coords()).norm();
    sup_disp = std::max(sup_disp, disp);
    double bound = cartan_projection(b.g).norm() + cartan_projection(bp.g).norm();
    r_bound = std::max(r_bound, bound);
  }
  CHECK(sup_disp <= r_bound);
}

TEST_CASE("modular character vanishes on unimodular variants") {
  auto z1 = modular_character(SubgroupSpec::diagonal_torus(2));
  CHECK(z1.cwiseAbs().maxCoeff() < 1e-10);
  auto z2 = modular_character(SubgroupSpec::upper_unipotent(2));
  CHECK(z2.cwiseAbs().maxCoeff() < 1e-10);
  auto z3 = modular_character(SubgroupSpec::block_reductive(3, {2}, {0}));
  CHECK(z3.cwiseAbs().maxCoeff() < 1e-10);
  auto gens = SubgroupSpec::discrete(2, {GroupElement::identity(2)});
  CHECK_THROWS_AS(modular_character(gens), std::invalid_argument);
}

TEST_CASE("subgroup spec validation") {
  CHECK_THROWS_AS(SubgroupSpec::discrete(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(SubgroupSpec::block_reductive(3, {2, 2}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SubgroupSpec::block_reductive(3, {4}, {0}), std::invalid_argument);
  CHECK_NOTHROW(SubgroupSpec::block_reductive(4, {2, 2}, {0, 2}));
}

TEST_CASE("box sampler determinism and edge cases") {
  auto box = ChartBox::cube(2, 0.4);
  CHECK(sample_box(box, 0, 1).empty());
  auto a = sample_box(box, 50, 99);
  auto b = sample_box(box, 50, 99);
  REQUIRE(a.size() == 50);
  for (size_t i = 0; i < a.size(); ++i)
    CHECK((a[i].g.mat() - b[i].g.mat()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(sample_box(box, -1, 1), std::invalid_argument);
  ChartBox empty = box;
  empty.hi[0] = empty.lo[0];
  CHECK_THROWS_AS(sample_box(empty, 1, 1), std::invalid_argument);
}

TEST_CASE("sampled Haar integrals match grid quadrature") {
  // Asymmetric box so the haar density matters.
  ChartBox box;
  box.n = 2;
  box.lo = Eigen::Vector3d(-0.3, -0.6, -0.2);
  box.hi = Eigen::Vector3d(0.5, 0.4, 0.7);
  const long count = 20000;
  auto samples = sample_box(box, count, 31);

  // Haar volume of the box: the weighted estimate is exact by construction
  // (constant weights), so compare against the grid with a Richardson bound.
  double vol_est = 0.0;
  for (const auto& w : samples) vol_est += w.weight;
  vol_est /= count;
  double o64 = oracles::grid_quadrature(
      {{-0.3, 0.5}, {-0.6, 0.4}, {-0.2, 0.7}}, 64,
      [](const std::vector<double>& p) { return std::exp(2.0 * p[1]); });
  double o128 = oracles::grid_quadrature(
      {{-0.3, 0.5}, {-0.6, 0.4}, {-0.2, 0.7}}, 128,
      [](const std::vector<double>& p) { return std::exp(2.0 * p[1]); });
  CHECK(std::abs(vol_est - o128) <= 3.0 * std::abs(o128 - o64) + 1e-9);
  CHECK(box_haar_volume(box) == doctest::Approx(o128).epsilon(1e-4));

  // A nonconstant integrand exercises the weights stochastically; compare
  // within 3 standard errors of the grid value.
  auto f = [](double v, double x, double u) { return std::cos(3 * v) * (1 + x * x) * std::exp(-u); };
  double est = 0.0, est2 = 0.0;
  for (const auto& w : samples) {
    double val = w.weight * f(w.params[0], w.params[1], w.params[2]);
    est += val;
    est2 += val * val;
  }
  est /= count;
  double stderr_est = std::sqrt(std::max(0.0, est2 / count - est * est) / count);
  double of = oracles::grid_quadrature(
      {{-0.3, 0.5}, {-0.6, 0.4}, {-0.2, 0.7}}, 128,
      [&](const std::vector<double>& p) { return std::exp(2.0 * p[1]) * f(p[0], p[1], p[2]); });
  CHECK(std::abs(est - of) <= 3.0 * stderr_est + 1e-6);
}

TEST_CASE("chart factorization round trip") {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    int n = 2 + static_cast<int>(rng.below(2));
    Eigen::VectorXd p(chart_dim(n));
    for (int j = 0; j < p.size(); ++j) p[j] = rng.uniform(-0.8, 0.8);
    auto g = chart_point(n, p);
    auto q = chart_factor(g.mat());
    REQUIRE(q);
    CHECK((*q - p).cwiseAbs().maxCoeff() < 1e-9);
  }
  // Off-cell matrix: vanishing leading entry.
  Eigen::Matrix2d s;
  s << 0, -1, 1, 0;
  CHECK_FALSE(chart_factor(s));
}

TEST_CASE("generators json round trip") {
  ojson j;
  j["n"] = 2;
  j["exact"] = true;
  j["gens"] = ojson::array({ojson::array({ojson::array({"0", "-1"}), ojson::array({"1", "0"})}),
                            ojson::array({ojson::array({"1", "1"}), ojson::array({"0", "1"})})});
  auto spec = read_generators_json(j);
  const auto& dg = std::get<DiscreteGenerators>(spec.variant);
  REQUIRE(dg.generators.size() == 2);
  CHECK(dg.exact);
  CHECK(dg.generators[0].rational()[0][1] == Rat(-1));
}
