#include "temperlab/beta_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "temperlab/rhofun.hpp"
#include "temperlab/rng.hpp"

namespace temperlab::beta_solver {

PairSpec::PairSpec(int dim_, rootdata::WeightSystem h, rootdata::WeightSystem g, std::string label_,
                   bool allow_degenerate_g_)
    : dim(dim_),
      h_system(std::move(h)),
      g_system(std::move(g)),
      label(std::move(label_)),
      allow_degenerate_g(allow_degenerate_g_) {
  if (h_system.dim() != dim || g_system.dim() != dim)
    throw std::invalid_argument("PairSpec: weight systems must share the parameter dimension");
  if (dim > 0 && !allow_degenerate_g && !h_system.empty()) {
    RatMat rows;
    for (const auto& w : g_system.weights()) rows.push_back(w.covector);
    if (ratlinalg::rank(rows) != dim)
      throw std::invalid_argument(
          "PairSpec: g weights do not span the dual space (set allow_degenerate_g to accept)");
  }
}

ojson PairSpec::to_json() const {
  ojson j;
  j["label"] = label;
  j["dim"] = dim;
  j["h"] = h_system.to_json();
  j["g"] = g_system.to_json();
  if (allow_degenerate_g) j["allow_degenerate_g"] = true;
  return j;
}

PairSpec PairSpec::from_json(const ojson& j) {
  return PairSpec(j.at("dim").get<int>(), rootdata::WeightSystem::from_json(j.at("h")),
                  rootdata::WeightSystem::from_json(j.at("g")),
                  j.value("label", std::string{}), j.value("allow_degenerate_g", false));
}

namespace {

// Distinct kernel normals of both systems plus coordinate hyperplanes, in
// canonical integer form. Adding the coordinate hyperplanes keeps every
// cone of the arrangement pointed without changing the maximum.
std::vector<std::vector<long long>> arrangement_normals(const PairSpec& pair) {
  std::set<std::vector<long long>> normals;
  auto add = [&](const RatVec& cv) {
    auto c = ratlinalg::canonical_ray(cv);
    if (!c.empty()) normals.insert(std::move(c));
  };
  for (const auto& w : pair.h_system.weights()) add(w.covector);
  for (const auto& w : pair.g_system.weights()) add(w.covector);
  for (int i = 0; i < pair.dim; ++i) {
    RatVec e(pair.dim, Rat(0));
    e[i] = Rat(1);
    add(e);
  }
  return {normals.begin(), normals.end()};
}

long long binom_capped(long n, long k, long long cap) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

BetaResult beta_exact(const PairSpec& pair) {
  const int d = pair.dim;
  BetaResult res;
  res.beta = Rat(0);
  res.witness.assign(static_cast<size_t>(std::max(d, 0)), Rat(0));
  if (pair.h_system.empty()) return res;  // rho_h == 0 identically

  if (pair.g_system.empty())
    throw std::invalid_argument("beta_exact: nonzero h weights over an all-zero g system");

  rhofun::RhoFunction rho_h(pair.h_system), rho_g(pair.g_system);

  auto normals = arrangement_normals(pair);
  const long m = static_cast<long>(normals.size());
  if (binom_capped(m, d - 1, kMaxRaySubsets) > kMaxRaySubsets)
    throw std::length_error("beta_exact: candidate subset count exceeds the cap");

  std::set<std::vector<long long>> seen;
  std::optional<std::vector<long long>> best_ray;

  std::vector<int> idx(static_cast<size_t>(std::max(d - 1, 0)));
  for (int i = 0; i < d - 1; ++i) idx[i] = i;

  auto eval_ray = [&](const RatVec& ray, const std::vector<long long>& canon) {
    Rat h = rho_h.eval(ray);
    Rat g = rho_g.eval(ray);
    if (g.is_zero()) {
      if (h.is_zero()) return;  // 0/0 = 0 off the origin
      throw std::invalid_argument("beta_exact: rho_g vanishes where rho_h does not (unbounded ratio)");
    }
    Rat ratio = h / g;
    // Ties resolved by the lexicographically smallest canonical witness.
    if (ratio > res.beta || (!best_ray && ratio == res.beta) ||
        (best_ray && ratio == res.beta && canon < *best_ray)) {
      res.beta = ratio;
      best_ray = canon;
      res.witness = ray;
    }
  };

  auto consider_subset = [&]() {
    ++res.subsets_examined;
    RatMat rows;
    rows.reserve(idx.size());
    for (int i : idx) {
      RatVec cv(d);
      for (int j = 0; j < d; ++j) cv[j] = Rat(normals[i][j]);
      rows.push_back(std::move(cv));
    }
    auto ker = ratlinalg::kernel_ray(std::move(rows), d);
    if (!ker) return;
    auto canon = ratlinalg::canonical_ray(*ker);
    if (canon.empty() || !seen.insert(canon).second) return;
    ++res.rays_examined;
    RatVec ray(d);
    for (int j = 0; j < d; ++j) ray[j] = Rat(canon[j]);
    eval_ray(ray, canon);
  };

  if (d == 0) return res;
  if (d - 1 == 0) {
    consider_subset();  // empty subset: the single ray of a 1-D space
  } else {
    // Lexicographic combinations of size d-1 out of m normals.
    if (m >= d - 1) {
      while (true) {
        consider_subset();
        int i = d - 2;
        while (i >= 0 && idx[i] == m - (d - 1) + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < d - 1; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  return res;
}

double beta_sample_oracle(const PairSpec& pair, long samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("beta_sample_oracle: samples must be >= 1");
  const int d = pair.dim;
  if (d == 0 || pair.h_system.empty()) return 0.0;
  rhofun::RhoFunction rho_h(pair.h_system), rho_g(pair.g_system);

  auto ratio_at = [&](const Eigen::VectorXd& u) {
    double g = rho_g.eval(u);
    double h = rho_h.eval(u);
    if (g == 0.0) return 0.0;  // 0/0 convention; positive h over zero g is
                               // rejected by beta_exact on valid pairs
    return h / g;
  };

  if (d == 1) {
    Eigen::VectorXd u(1);
    u[0] = 1.0;
    double plus = ratio_at(u);
    u[0] = -1.0;
    return std::max(plus, ratio_at(u));
  }

  double best = 0.0;
  Rng rng(seed);
  Eigen::VectorXd u(d);
  for (long s = 0; s < samples; ++s) {
    double norm2 = 0.0;
    do {
      for (int i = 0; i < d; ++i) u[i] = rng.gauss();
      norm2 = u.squaredNorm();
    } while (norm2 < 1e-12);
    u /= std::sqrt(norm2);
    best = std::max(best, ratio_at(u));
  }
  return best;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kTempered: return "Tempered";
    case Verdict::kNotTempered: return "NotTempered";
    case Verdict::kBoundaryExact: return "BoundaryExact";
    case Verdict::kIndeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Verdict verdict_from_exponent(const Rat& value, ExponentKind) {
  if (value < Rat(0)) throw std::invalid_argument("verdict_from_exponent: negative exponent");
  Rat half(1, 2);
  if (value == half) return Verdict::kBoundaryExact;
  return value < half ? Verdict::kTempered : Verdict::kNotTempered;
}

Verdict verdict_from_exponent(double value, double error_bar, ExponentKind) {
  if (value < 0.0) throw std::invalid_argument("verdict_from_exponent: negative exponent");
  if (error_bar < 0.0) throw std::invalid_argument("verdict_from_exponent: negative error bar");
  if (value > 1.0) value = 1.0;  // estimates may exceed 1 slightly
  if (value + error_bar < 0.5) return Verdict::kTempered;
  if (value - error_bar > 0.5) return Verdict::kNotTempered;
  return Verdict::kIndeterminate;
}

double p_from_theta(double theta) {
  if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("p_from_theta: theta outside [0,1]");
  if (theta >= 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - theta);
}

std::optional<Rat> p_from_theta(const Rat& theta) {
  if (theta < Rat(0) || theta > Rat(1)) throw std::invalid_argument("p_from_theta: theta outside [0,1]");
  if (theta == Rat(1)) return std::nullopt;
  return Rat(1) / (Rat(1) - theta);
}

ojson ExponentReport::to_json() const {
  ojson j;
  j["label"] = label;
  if (beta_exact_value) {
    j["beta"] = rat_to_json(*beta_exact_value);
    j["beta_float"] = beta_exact_value->to_double();
  }
  if (beta_oracle) j["beta_oracle"] = *beta_oracle;
  if (!witness.empty()) j["witness"] = ratvec_to_json(witness);
  if (delta) {
    j["delta"] = *delta;
    if (delta_bracket) j["delta_bracket"] = ojson::array({delta_bracket->first, delta_bracket->second});
  }
  if (theta_hat) {
    j["theta_hat"] = *theta_hat;
    if (theta_residual) j["theta_fit_residual"] = *theta_residual;
  }
  if (p_infinite)
    j["p"] = "inf";
  else if (p_exact)
    j["p"] = rat_to_json(*p_exact);
  else
    j["p"] = p;
  j["verdict"] = verdict_name(verdict);
  j["identity"] = identity_used;
  j["method"] = method;
  return j;
}

}  // namespace temperlab::beta_solver
