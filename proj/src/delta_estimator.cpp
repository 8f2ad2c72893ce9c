#include "temperlab/delta_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "temperlab/rhofun.hpp"
#include "temperlab/rng.hpp"

namespace temperlab::delta_estimator {

long OrbitBall::size_at_depth(int depth) const {
  long c = 0;
  for (const auto& e : elements_)
    if (e.word_length <= depth) ++c;
  return c;
}

namespace {

uint64_t mix64(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdULL;
  return h ^ (h >> 33);
}

uint64_t exact_hash(const RatMat& m) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (const auto& row : m)
    for (const Rat& x : row) {
      h = mix64(h, static_cast<uint64_t>(x.num()));
      h = mix64(h, static_cast<uint64_t>(x.den()));
    }
  return h;
}

uint64_t grid_hash(const Eigen::MatrixXd& m, double grid) {
  uint64_t h = 0x452821e638d01377ULL;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      double r = std::nearbyint(m(i, j) / grid);
      h = mix64(h, static_cast<uint64_t>(static_cast<long long>(r)));
    }
  return h;
}

bool exact_equal(const RatMat& a, const RatMat& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != b[i][j]) return false;
  return true;
}

double s_value_of(const matgroup::GroupElement& g, const RatVec& rho) {
  auto kappa = matgroup::cartan_projection(g);
  return 2.0 * rootdata::apply_covector(rho, kappa.coords());
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit f;
  f.points = static_cast<int>(xs.size());
  if (f.points < 2) return f;
  double mx = 0, my = 0;
  for (int i = 0; i < f.points; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= f.points;
  my /= f.points;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (int i = 0; i < f.points; ++i) {
    double r = ys[i] - (f.intercept + f.slope * xs[i]);
    sse += r * r;
  }
  if (f.points > 2) f.slope_stderr = std::sqrt(sse / (f.points - 2) / sxx);
  return f;
}

constexpr double kShellWidth = 0.5;

// Cumulative counts N(R) on shells of width 0.5 for elements with
// word_length <= depth.
std::vector<std::pair<double, long>> shell_counts(const OrbitBall& ball, int depth) {
  double smax = 0.0;
  for (const auto& e : ball.elements())
    if (e.word_length <= depth) smax = std::max(smax, e.s_value);
  int nshells = static_cast<int>(std::floor(smax / kShellWidth)) + 1;
  std::vector<long> counts(nshells, 0);
  for (const auto& e : ball.elements()) {
    if (e.word_length > depth) continue;
    int j = std::min(nshells - 1, static_cast<int>(std::floor(e.s_value / kShellWidth)));
    ++counts[j];
  }
  std::vector<std::pair<double, long>> out(nshells);
  long cum = 0;
  for (int j = 0; j < nshells; ++j) {
    cum += counts[j];
    out[j] = {kShellWidth * (j + 1), cum};
  }
  return out;
}

// Fit window: drop the smallest 30% and the largest 10% of shells.
LineFit fit_shells(const std::vector<std::pair<double, long>>& shells) {
  const int nshells = static_cast<int>(shells.size());
  int lo = static_cast<int>(std::ceil(0.3 * nshells));
  int hi = static_cast<int>(std::floor(0.9 * nshells));
  std::vector<double> xs, ys;
  for (int j = lo; j < hi; ++j) {
    if (shells[j].second <= 0) continue;
    xs.push_back(shells[j].first);
    ys.push_back(std::log(static_cast<double>(shells[j].second)));
  }
  return fit_line(xs, ys);
}

}  // namespace

OrbitBall enumerate_ball(const matgroup::SubgroupSpec& spec, int depth,
                         const EnumerationOptions& opts) {
  const auto* dg = std::get_if<matgroup::DiscreteGenerators>(&spec.variant);
  if (!dg) throw std::invalid_argument("enumerate_ball: spec must carry discrete generators");
  if (depth < 0) throw std::invalid_argument("enumerate_ball: negative depth");
  const bool exact = dg->exact;
  const int n = spec.n;
  const RatVec rho = rootdata::rho_form(n);

  // Generator set closed under inverses, deduplicated.
  std::vector<matgroup::GroupElement> gens;
  {
    std::vector<matgroup::GroupElement> raw = dg->generators;
    for (const auto& g : dg->generators) raw.push_back(g.inverse());
    for (const auto& g : raw) {
      bool dup = false;
      for (const auto& h : gens) {
        if (exact ? exact_equal(g.rational(), h.rational())
                  : (g.mat() - h.mat()).cwiseAbs().maxCoeff() <= opts.collision_audit) {
          dup = true;
          break;
        }
      }
      if (!dup) gens.push_back(g);
    }
  }

  uint64_t fp = 0x13198a2e03707344ULL;
  for (const auto& g : gens)
    fp = mix64(fp, exact ? exact_hash(g.rational()) : grid_hash(g.mat(), opts.dedup_grid));

  std::vector<OrbitElement> elements;
  std::unordered_map<uint64_t, std::vector<size_t>> buckets;
  bool truncated = false;

  auto try_insert = [&](matgroup::GroupElement g, int word_length) -> bool {
    uint64_t h = exact ? exact_hash(g.rational()) : grid_hash(g.mat(), opts.dedup_grid);
    auto& bucket = buckets[h];
    for (size_t i : bucket) {
      const auto& other = elements[i].g;
      if (exact) {
        if (exact_equal(g.rational(), other.rational())) return false;
      } else {
        // Grid hashes collide for nearby floats; audit with a plain bound.
        if ((g.mat() - other.mat()).cwiseAbs().maxCoeff() <= opts.collision_audit) return false;
      }
    }
    double s = s_value_of(g, rho);
    bucket.push_back(elements.size());
    elements.push_back({std::move(g), word_length, s});
    return true;
  };

  try_insert(matgroup::GroupElement::identity(n), 0);
  size_t level_begin = 0;
  for (int level = 1; level <= depth && !truncated; ++level) {
    size_t level_end = elements.size();
    for (size_t i = level_begin; i < level_end && !truncated; ++i) {
      for (const auto& gen : gens) {
        if (static_cast<long>(elements.size()) >= opts.max_elements) {
          truncated = true;
          break;
        }
        try_insert(elements[i].g * gen, level);
      }
    }
    level_begin = level_end;
  }
  return OrbitBall(std::move(elements), depth, fp, truncated);
}

double poincare_partial(const OrbitBall& ball, double t) {
  if (t < 0.0) throw std::invalid_argument("poincare_partial: t must be >= 0");
  double s = 0.0;
  for (const auto& e : ball.elements()) s += std::exp(-t * e.s_value);
  return s;
}

ojson AbscissaEstimate::to_json() const {
  ojson j;
  j["delta"] = value;
  j["bracket"] = ojson::array({lower, upper});
  j["status"] = status == Status::kOk ? "ok" : (status == Status::kTruncated ? "truncated" : "indeterminate");
  ojson sh = ojson::array();
  for (const auto& [r, cnt] : shells) {
    ojson e;
    e["R"] = r;
    e["N"] = cnt;
    sh.push_back(e);
  }
  j["shells"] = sh;
  j["depth"] = depth_schedule.empty() ? 0 : depth_schedule.back();
  j["diagnostics"] = diagnostics;
  return j;
}

AbscissaEstimate delta_discrete(const matgroup::SubgroupSpec& gens,
                                const std::vector<int>& depth_schedule,
                                const EnumerationOptions& opts) {
  if (depth_schedule.empty()) throw std::invalid_argument("delta_discrete: empty depth schedule");
  for (size_t i = 1; i < depth_schedule.size(); ++i)
    if (depth_schedule[i] <= depth_schedule[i - 1])
      throw std::invalid_argument("delta_discrete: schedule must be increasing");

  AbscissaEstimate est;
  est.depth_schedule = depth_schedule;
  const int max_depth = depth_schedule.back();
  OrbitBall ball = enumerate_ball(gens, max_depth, opts);

  est.shells = shell_counts(ball, max_depth);

  std::vector<double> depth_slopes;
  ojson fits = ojson::array();
  for (int depth : depth_schedule) {
    auto sh = shell_counts(ball, depth);
    LineFit f = fit_shells(sh);
    ojson fj;
    fj["depth"] = depth;
    fj["elements"] = ball.size_at_depth(depth);
    fj["shells"] = static_cast<long>(sh.size());
    fj["slope"] = f.slope;
    fj["slope_stderr"] = f.slope_stderr;
    fj["fit_points"] = f.points;
    fits.push_back(fj);
    if (f.points >= 3) depth_slopes.push_back(f.slope);
  }
  est.diagnostics["depth_fits"] = fits;

  LineFit deepest = fit_shells(est.shells);
  if (deepest.points < 3 || depth_slopes.empty()) {
    est.status = AbscissaEstimate::Status::kIndeterminate;
    est.value = std::max(0.0, deepest.slope);
    est.lower = 0.0;
    est.upper = std::max(est.value, 1.0);
    return est;
  }

  est.value = std::max(0.0, deepest.slope);

  // Divergence / flatness of the partial sums across the schedule, on a t
  // grid around the fitted value.
  double div_lower = 0.0;
  double flat_upper = std::numeric_limits<double>::infinity();
  ojson tprobe = ojson::array();
  if (depth_schedule.size() >= 2) {
    for (int k = -6; k <= 6; ++k) {
      double t = est.value + 0.05 * k;
      if (t < 0.0) continue;
      std::vector<double> partials;
      for (int depth : depth_schedule) {
        double p = 0.0;
        for (const auto& e : ball.elements())
          if (e.word_length <= depth) p += std::exp(-t * e.s_value);
        partials.push_back(p);
      }
      size_t m = partials.size();
      double incr_last = partials[m - 1] - partials[m - 2];
      double incr_prev = m >= 3 ? partials[m - 2] - partials[m - 3] : incr_last;
      bool diverging = incr_last > 0 && incr_last >= 0.8 * incr_prev &&
                       incr_last >= 0.02 * partials[m - 1];
      bool flat = incr_last <= 0.005 * partials[m - 1];
      ojson tj;
      tj["t"] = t;
      tj["partial"] = partials[m - 1];
      tj["increment"] = incr_last;
      tj["classified"] = diverging ? "diverging" : (flat ? "flat" : "unclear");
      tprobe.push_back(tj);
      if (diverging) div_lower = std::max(div_lower, t);
      if (flat) flat_upper = std::min(flat_upper, t);
    }
  }
  est.diagnostics["partial_sum_probe"] = tprobe;

  double fit_spread = 0.0;
  for (double s : depth_slopes) fit_spread = std::max(fit_spread, std::abs(s - deepest.slope));
  double half_width = std::max(2.0 * deepest.slope_stderr, fit_spread);
  est.lower = std::max(0.0, est.value - half_width);
  est.upper = est.value + half_width;
  // Divergence of the partial sums at t certifies delta >= t (up to finite
  // depth): it raises the lower bracket toward the value and pushes the
  // upper bracket out when the probe kept diverging past the fit.
  if (div_lower > 0.0) {
    est.lower = std::max(est.lower, std::min(div_lower, est.value));
    est.upper = std::max(est.upper, div_lower + 0.05);
  }
  // Flat partial sums at t suggest convergence, so delta <= t.
  if (std::isfinite(flat_upper)) est.upper = std::min(est.upper, std::max(flat_upper, est.value));
  est.status = ball.truncated() ? AbscissaEstimate::Status::kTruncated : AbscissaEstimate::Status::kOk;
  est.diagnostics["fit_window"] = "drop smallest 30% and largest 10% of shells";
  est.diagnostics["div_lower"] = div_lower;
  return est;
}

double growth_indicator(const matgroup::SubgroupSpec& gens, const matgroup::CartanVector& direction,
                        double aperture, int depth, const EnumerationOptions& opts) {
  if (!(aperture > 0.0) || !(aperture < M_PI / 2))
    throw std::invalid_argument("growth_indicator: aperture must lie in (0, pi/2)");
  if (!(direction.norm() > 0.0) || !direction.is_dominant(1e-12))
    throw std::invalid_argument("growth_indicator: direction must be nonzero dominant");

  OrbitBall ball = enumerate_ball(gens, depth, opts);
  Eigen::VectorXd dir = direction.coords() / direction.norm();
  const double cos_ap = std::cos(aperture);

  std::vector<double> radii;
  for (const auto& e : ball.elements()) {
    auto kappa = matgroup::cartan_projection(e.g);
    double r = kappa.norm();
    if (r < 1e-9) continue;
    if (kappa.coords().dot(dir) / r >= cos_ap) radii.push_back(r);
  }
  if (radii.empty()) return kGrowthIndicatorEmpty;

  std::sort(radii.begin(), radii.end());
  double rmax = radii.back();
  int nshells = static_cast<int>(std::floor(rmax / kShellWidth)) + 1;
  std::vector<std::pair<double, long>> shells(nshells);
  {
    size_t pos = 0;
    long cum = 0;
    for (int j = 0; j < nshells; ++j) {
      double edge = kShellWidth * (j + 1);
      while (pos < radii.size() && radii[pos] <= edge) { ++pos; ++cum; }
      shells[j] = {edge, cum};
    }
  }
  LineFit f = fit_shells(shells);
  if (f.points < 2) return kGrowthIndicatorEmpty;
  return direction.norm() * f.slope;
}

AbscissaEstimate delta_reductive_quadrature(const beta_solver::PairSpec& pair,
                                            const RatMat& embedding, int ambient_n,
                                            const std::vector<double>& t_grid, double truncation,
                                            const ReductiveQuadratureOptions& opts) {
  if (!(truncation > 0.0)) throw std::invalid_argument("delta_reductive_quadrature: truncation <= 0");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("delta_reductive_quadrature: t grid must increase");
  const int d = pair.dim;
  AbscissaEstimate est;
  est.diagnostics["seed"] = opts.seed;

  if (d == 0 || pair.h_system.empty()) {
    // Empty Sigma_H: the integrand is dominated by the decaying exponential
    // alone, so the integral converges for every t > 0.
    est.value = 0.0;
    est.lower = 0.0;
    est.upper = t_grid.empty() ? 0.0 : t_grid.front();
    est.status = AbscissaEstimate::Status::kOk;
    return est;
  }

  if (static_cast<int>(embedding.size()) != ambient_n)
    throw std::invalid_argument("delta_reductive_quadrature: embedding rows != ambient rank");
  for (const auto& row : embedding)
    if (static_cast<int>(row.size()) != d)
      throw std::invalid_argument("delta_reductive_quadrature: embedding cols != pair dimension");

  const RatVec rho_g_ambient = rootdata::rho_form(ambient_n);
  rhofun::RhoFunction rho_h(pair.h_system);

  // One weight per +/- pair of the symmetric h system.
  std::vector<std::pair<Eigen::VectorXd, long>> demi;
  for (const auto& w : pair.h_system.weights()) {
    int sign = 0;
    for (const Rat& c : w.covector) {
      if (!c.is_zero()) { sign = c.sign(); break; }
    }
    if (sign <= 0) continue;
    Eigen::VectorXd cv(d);
    for (int i = 0; i < d; ++i) cv[i] = w.covector[i].to_double();
    demi.emplace_back(cv, w.multiplicity);
  }

  Eigen::MatrixXd emb(ambient_n, d);
  for (int i = 0; i < ambient_n; ++i)
    for (int j = 0; j < d; ++j) emb(i, j) = embedding[i][j].to_double();

  // Rate of the ambient exponential per unit radius along u.
  auto g_rate = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd x = emb * u;
    std::sort(x.data(), x.data() + x.size(), std::greater<double>());
    return 2.0 * rootdata::apply_covector(rho_g_ambient, x);
  };
  auto h_rate = [&](const Eigen::VectorXd& u) { return rho_h.eval(u); };

  // The abscissa value: maximum ray rate over unit directions. The ratio is
  // invariant under sign flip and the subgroup Weyl action, so sampling the
  // whole sphere loses nothing.
  double best = 0.0;
  if (d == 1) {
    Eigen::VectorXd u(1);
    u[0] = 1.0;
    double g = g_rate(u);
    if (g > 0.0) best = h_rate(u) / g;
  } else {
    Rng rng(opts.seed);
    Eigen::VectorXd u(d);
    for (long s = 0; s < opts.value_directions; ++s) {
      double norm2 = 0.0;
      do {
        for (int i = 0; i < d; ++i) u[i] = rng.gauss();
        norm2 = u.squaredNorm();
      } while (norm2 < 1e-12);
      u /= std::sqrt(norm2);
      double g = g_rate(u);
      if (g <= 0.0) continue;
      best = std::max(best, h_rate(u) / g);
    }
  }
  est.value = best;

  // Truncated radial integrals classify each grid t as diverging/converged.
  auto log_radial_integral = [&](const Eigen::VectorXd& u, double t, double tmax, long nodes) {
    double gr = g_rate(u);
    double dr = tmax / static_cast<double>(nodes);
    double logmax = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(static_cast<size_t>(nodes));
    for (long i = 1; i <= nodes; ++i) {
      double r = dr * static_cast<double>(i);
      double lf = -t * gr * r + (d - 1) * std::log(r);
      for (const auto& [cv, m] : demi) {
        double a = std::abs(cv.dot(u)) * r;
        // log sinh(a), stable for large a
        double ls = a > 20.0 ? a - std::log(2.0) : std::log(std::sinh(std::max(a, 1e-300)));
        lf += static_cast<double>(m) * ls;
      }
      logs[static_cast<size_t>(i - 1)] = lf;
      logmax = std::max(logmax, lf);
    }
    if (!std::isfinite(logmax)) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double lf : logs) acc += std::exp(lf - logmax);
    return logmax + std::log(acc * dr);
  };

  double div_lower = -1.0;
  double conv_upper = std::numeric_limits<double>::infinity();
  ojson probe = ojson::array();
  Rng dir_rng(opts.seed ^ 0xabcdef12345ULL);
  std::vector<Eigen::VectorXd> dirs;
  if (d == 1) {
    Eigen::VectorXd u(1);
    u[0] = 1.0;
    dirs.push_back(u);
  } else {
    for (long s = 0; s < opts.bracket_directions; ++s) {
      Eigen::VectorXd u(d);
      double norm2 = 0.0;
      do {
        for (int i = 0; i < d; ++i) u[i] = dir_rng.gauss();
        norm2 = u.squaredNorm();
      } while (norm2 < 1e-12);
      dirs.push_back(u / std::sqrt(norm2));
    }
  }
  for (double t : t_grid) {
    bool any_diverging = false;
    bool all_converged = true;
    for (const auto& u : dirs) {
      double full = log_radial_integral(u, t, truncation, opts.radial_nodes);
      double half = log_radial_integral(u, t, truncation / 2.0, opts.radial_nodes / 2);
      double growth = full - half;
      if (growth > std::log(1.5)) any_diverging = true;
      if (growth > std::log(1.02)) all_converged = false;
    }
    ojson tj;
    tj["t"] = t;
    tj["classified"] = any_diverging ? "diverging" : (all_converged ? "converged" : "unclear");
    probe.push_back(tj);
    if (any_diverging) div_lower = std::max(div_lower, t);
    if (all_converged) conv_upper = std::min(conv_upper, t);
  }
  est.diagnostics["t_probe"] = probe;

  if (!std::isfinite(conv_upper) || (div_lower >= 0.0 && div_lower >= conv_upper)) {
    est.status = AbscissaEstimate::Status::kIndeterminate;
    est.lower = std::max(0.0, div_lower);
    est.upper = std::isfinite(conv_upper) ? conv_upper : (t_grid.empty() ? est.value : t_grid.back());
    est.lower = std::min(est.lower, est.value);
    est.upper = std::max(est.upper, est.value);
    return est;
  }
  est.lower = std::min(std::max(0.0, div_lower), est.value);
  est.upper = std::max(conv_upper, est.value);
  est.status = AbscissaEstimate::Status::kOk;
  return est;
}

}  // namespace temperlab::delta_estimator
