#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "temperlab/beta_solver.hpp"
#include "temperlab/rhofun.hpp"
#include "temperlab/rng.hpp"

using namespace temperlab;
using namespace temperlab::beta_solver;
using rootdata::WeightSystem;

namespace {

PairSpec sl2_in_sl3() {
  WeightSystem h(1, {{{Rat(2)}, 1}, {{Rat(-2)}, 1}}, 1);
  WeightSystem g(1, {{{Rat(2)}, 1}, {{Rat(-2)}, 1}, {{Rat(1)}, 2}, {{Rat(-1)}, 2}}, 2);
  return PairSpec(1, h, g, "sl2-in-sl3");
}

PairSpec sl2_in_sl4() {
  WeightSystem h(1, {{{Rat(2)}, 1}, {{Rat(-2)}, 1}}, 1);
  WeightSystem g(1, {{{Rat(2)}, 1}, {{Rat(-2)}, 1}, {{Rat(1)}, 4}, {{Rat(-1)}, 4}}, 4);
  return PairSpec(1, h, g, "sl2-in-sl4");
}

PairSpec h_equals_g(int n) {
  // Full-coordinate root systems vanish on the trace direction, which is
  // exactly the degenerate-denominator case the acknowledgment flag covers.
  auto roots = rootdata::restricted_roots(n);
  return PairSpec(n, roots, roots, "h-equals-g", /*allow_degenerate_g=*/true);
}

}  // namespace

TEST_CASE("beta exact: degenerate inputs") {
  // empty h system: beta = 0, zero witness, no error
  WeightSystem empty_h(2, {}, 3);
  auto g = rootdata::restricted_roots(2);
  WeightSystem g2(2, g.weights(), g.zero_multiplicity());
  auto r = beta_exact(PairSpec(2, empty_h, g2, "empty"));
  CHECK(r.beta == Rat(0));
  CHECK(r.witness == RatVec{Rat(0), Rat(0)});

  // all-zero g with nonzero h is ill-posed
  WeightSystem h1(1, {{{Rat(1)}, 1}, {{Rat(-1)}, 1}}, 0);
  WeightSystem g0(1, {}, 2);
  CHECK_THROWS_AS(beta_exact(PairSpec(1, h1, g0, "bad", /*allow_degenerate_g=*/true)),
                  std::invalid_argument);
}

TEST_CASE("beta exact: H equals G gives 1") {
  for (int n : {2, 3, 4}) {
    auto r = beta_exact(h_equals_g(n));
    CHECK(r.beta == Rat(1));
    // witness ratio is exactly beta
    rhofun::RhoFunction rh(h_equals_g(n).h_system);
    CHECK(rh.eval(r.witness) / rh.eval(r.witness) == Rat(1));
  }
}

TEST_CASE("beta exact: catalog block pairs") {
  auto r3 = beta_exact(sl2_in_sl3());
  CHECK(r3.beta == Rat(1, 2));
  REQUIRE(r3.witness.size() == 1);
  CHECK(r3.witness[0] == Rat(1));

  auto r4 = beta_exact(sl2_in_sl4());
  CHECK(r4.beta == Rat(1, 3));
}

TEST_CASE("beta exact: 2d pair with interior maximum structure") {
  // h = sl(2) x sl(2) block weights on (x, y): {+-2x, +-2y};
  // g = sl(4) ambient weights on diag(x, -x, y, -y).
  std::vector<rootdata::Weight> gw;
  auto add = [&](long a, long b, long m) {
    gw.push_back({{Rat(a), Rat(b)}, m});
  };
  // e1-e2 -> 2x, e3-e4 -> 2y, e1-e3 -> x-y, e1-e4 -> x+y, e2-e3 -> -x-y, e2-e4 -> -x+y
  add(2, 0, 1); add(-2, 0, 1); add(0, 2, 1); add(0, -2, 1);
  add(1, -1, 1); add(-1, 1, 1); add(1, 1, 1); add(-1, -1, 1);
  add(-1, -1, 1); add(1, 1, 1); add(-1, 1, 1); add(1, -1, 1);
  WeightSystem g(2, gw, 3);
  WeightSystem h(2, {{{Rat(2), Rat(0)}, 1}, {{Rat(-2), Rat(0)}, 1}, {{Rat(0), Rat(2)}, 1}, {{Rat(0), Rat(-2)}, 1}}, 2);
  PairSpec pair(2, h, g, "sl2xsl2-in-sl4");
  auto r = beta_exact(pair);
  // By hand: at (1,0): rho_h = 2, rho_g = 2 + 0 + 4*(1/2)... compute:
  // rho_g(1,0) = (|2|+|2| + 4*|1| + ... ) / 2 = (2+2+0+0+1+1+1+1+1+1+1+1)/2 = 6
  // ratio 1/3; at (1,1): rho_h = 4, rho_g = (2+2+2+2+0+0+2+2+0+0+2+2)/2 = 8, ratio 1/2.
  CHECK(r.beta == Rat(1, 2));
  rhofun::RhoFunction rh(h), rg(g);
  CHECK(rh.eval(r.witness) / rg.eval(r.witness) == r.beta);

  // oracle stays below the exact value and within 0.02 for d <= 3
  double o = beta_sample_oracle(pair, 100000, 17);
  CHECK(o <= r.beta.to_double() + 1e-9);
  CHECK(o >= r.beta.to_double() - 0.02);
}

TEST_CASE("beta sample oracle") {
  // H = G: ratio identically 1, any seed
  for (uint64_t seed : {1ULL, 2ULL, 99ULL})
    CHECK(beta_sample_oracle(h_equals_g(3), 50, seed) == 1.0);

  // empty h
  WeightSystem empty_h(2, {}, 3);
  auto g = rootdata::restricted_roots(2);
  CHECK(beta_sample_oracle(PairSpec(2, empty_h, WeightSystem(2, g.weights(), 1), "e"), 100, 5) == 0.0);

  // d = 1 is exhaustive: exactly 1/2
  CHECK(beta_sample_oracle(sl2_in_sl3(), 3, 123) == 0.5);

  CHECK_THROWS_AS(beta_sample_oracle(sl2_in_sl3(), 0, 1), std::invalid_argument);
}

TEST_CASE("beta invariants: bounds, scaling, witness validity") {
  // h a sub-multiset of g's restriction data implies beta in [0,1]
  auto pair = sl2_in_sl3();
  auto r = beta_exact(pair);
  CHECK(r.beta >= Rat(0));
  CHECK(r.beta <= Rat(1));

  // scaling both systems by the same positive rational leaves beta unchanged
  auto scale_sys = [](const WeightSystem& ws, const Rat& c) {
    std::vector<rootdata::Weight> out;
    for (const auto& w : ws.weights()) {
      RatVec cv = w.covector;
      for (auto& x : cv) x *= c;
      out.push_back({cv, w.multiplicity});
    }
    return WeightSystem(ws.dim(), out, ws.zero_multiplicity());
  };
  for (const Rat& c : {Rat(3), Rat(1, 7), Rat(22, 5)}) {
    PairSpec scaled(pair.dim, scale_sys(pair.h_system, c), scale_sys(pair.g_system, c), "scaled");
    CHECK(beta_exact(scaled).beta == r.beta);
  }

  // witness validity on a batch of random valid pairs
  Rng rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 1 + static_cast<int>(rng.below(3));
    std::vector<rootdata::Weight> hw, gw;
    int nw = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < nw; ++i) {
      RatVec cv(d), neg(d);
      bool nonzero = false;
      for (int j = 0; j < d; ++j) {
        long v = static_cast<long>(rng.below(5)) - 2;
        cv[j] = Rat(v);
        neg[j] = Rat(-v);
        nonzero = nonzero || v != 0;
      }
      if (!nonzero) continue;
      long m = 1 + static_cast<long>(rng.below(2));
      hw.push_back({cv, m});
      hw.push_back({neg, m});
      gw.push_back({cv, m});
      gw.push_back({neg, m});
    }
    // pad g so it spans and strictly dominates h
    for (int j = 0; j < d; ++j) {
      RatVec e(d, Rat(0)), ne(d, Rat(0));
      e[j] = Rat(1);
      ne[j] = Rat(-1);
      gw.push_back({e, 1});
      gw.push_back({ne, 1});
    }
    PairSpec p(d, WeightSystem(d, hw, 0), WeightSystem(d, gw, 0), "rand");
    auto res = beta_exact(p);
    CHECK(res.beta >= Rat(0));
    CHECK(res.beta <= Rat(1));
    if (!p.h_system.empty()) {
      rhofun::RhoFunction rh(p.h_system), rg(p.g_system);
      CHECK(rh.eval(res.witness) == res.beta * rg.eval(res.witness));
      double oracle = beta_sample_oracle(p, 100000, 1234 + trial);
      CHECK(oracle <= res.beta.to_double() + 1e-9);
      CHECK(oracle >= res.beta.to_double() - 0.02);
    }
  }
}

TEST_CASE("pair spec span validation and json") {
  WeightSystem h(2, {{{Rat(1), Rat(0)}, 1}, {{Rat(-1), Rat(0)}, 1}}, 0);
  WeightSystem g_bad(2, {{{Rat(1), Rat(0)}, 2}, {{Rat(-1), Rat(0)}, 2}}, 0);
  CHECK_THROWS_AS(PairSpec(2, h, g_bad, "nospan"), std::invalid_argument);
  CHECK_NOTHROW(PairSpec(2, h, g_bad, "nospan", /*allow_degenerate_g=*/true));

  auto pair = sl2_in_sl3();
  auto j = pair.to_json();
  auto back = PairSpec::from_json(j);
  CHECK(back.dim == pair.dim);
  CHECK(back.h_system == pair.h_system);
  CHECK(back.g_system == pair.g_system);
  CHECK(back.label == pair.label);
}

TEST_CASE("ray enumeration size cap") {
  // d = 8 with enough distinct kernels pushes C(m, d-1) past the cap.
  Rng rng(123);
  std::vector<rootdata::Weight> gw;
  for (int i = 0; i < 40; ++i) {
    RatVec cv(8);
    for (int j = 0; j < 8; ++j) cv[j] = Rat(static_cast<long>(rng.below(17)) + 1, 1 + (i + j) % 3);
    gw.push_back({cv, 1});
  }
  WeightSystem g(8, gw, 0);
  WeightSystem h(8, {gw.front()}, 0);
  PairSpec big(8, h, g, "too-big", /*allow_degenerate_g=*/true);
  CHECK_THROWS_AS(beta_exact(big), std::length_error);
}

TEST_CASE("exponent report json") {
  ExponentReport rep;
  rep.label = "demo";
  rep.beta_exact_value = Rat(1, 3);
  rep.witness = {Rat(1)};
  rep.p_exact = Rat(3, 2);
  rep.verdict = Verdict::kTempered;
  rep.identity_used = "theorem-a";
  auto j = rep.to_json();
  CHECK(j["beta"].get<std::string>() == "1/3");
  CHECK(j["p"].get<std::string>() == "3/2");
  CHECK(j["verdict"].get<std::string>() == "Tempered");

  ExponentReport inf_rep;
  inf_rep.label = "inf";
  inf_rep.p_infinite = true;
  auto j2 = inf_rep.to_json();
  CHECK(j2["p"].get<std::string>() == "inf");
}

TEST_CASE("verdicts") {
  CHECK(verdict_from_exponent(Rat(1, 3), ExponentKind::kBetaReductive) == Verdict::kTempered);
  CHECK(verdict_from_exponent(Rat(1), ExponentKind::kBetaReductive) == Verdict::kNotTempered);
  CHECK(verdict_from_exponent(Rat(1, 2), ExponentKind::kBetaReductive) == Verdict::kBoundaryExact);
  CHECK_THROWS_AS(verdict_from_exponent(Rat(-1, 2), ExponentKind::kDelta), std::invalid_argument);

  CHECK(verdict_from_exponent(0.3, 0.1, ExponentKind::kDelta) == Verdict::kTempered);
  CHECK(verdict_from_exponent(0.9, 0.1, ExponentKind::kDelta) == Verdict::kNotTempered);
  CHECK(verdict_from_exponent(0.5, 0.1, ExponentKind::kDelta) == Verdict::kIndeterminate);
  CHECK(verdict_from_exponent(1.05, 0.2, ExponentKind::kDelta) == Verdict::kNotTempered);
}

TEST_CASE("p from theta") {
  CHECK(p_from_theta(0.5) == doctest::Approx(2.0));
  CHECK(p_from_theta(0.0) == doctest::Approx(1.0));
  CHECK(p_from_theta(0.75) == doctest::Approx(4.0));
  CHECK(std::isinf(p_from_theta(1.0)));
  CHECK_THROWS_AS(p_from_theta(1.5), std::invalid_argument);
  CHECK_THROWS_AS(p_from_theta(-0.1), std::invalid_argument);

  CHECK(*p_from_theta(Rat(1, 2)) == Rat(2));
  CHECK(*p_from_theta(Rat(0)) == Rat(1));
  CHECK(*p_from_theta(Rat(3, 4)) == Rat(4));
  CHECK_FALSE(p_from_theta(Rat(1)));
}
