#include "temperlab/rhofun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "temperlab/rng.hpp"

namespace temperlab::rhofun {

Rat RhoFunction::eval(const RatVec& x) const {
  if (static_cast<int>(x.size()) != system_.dim())
    throw std::invalid_argument("RhoFunction::eval: dimension mismatch");
  Rat s(0);
  for (const auto& w : system_.weights())
    s += Rat(w.multiplicity) * rootdata::apply_covector(w.covector, x).abs();
  return s / Rat(2);
}

double RhoFunction::eval(const Eigen::VectorXd& x) const {
  if (x.size() != system_.dim()) throw std::invalid_argument("RhoFunction::eval: dimension mismatch");
  double s = 0.0;
  for (const auto& w : system_.weights())
    s += static_cast<double>(w.multiplicity) * std::abs(rootdata::apply_covector(w.covector, x));
  return 0.5 * s;
}

double RhoFunction::lipschitz_bound() const {
  double s = 0.0;
  for (const auto& w : system_.weights()) {
    double norm2 = 0.0;
    for (const Rat& c : w.covector) norm2 += c.to_double() * c.to_double();
    s += static_cast<double>(w.multiplicity) * std::sqrt(norm2);
  }
  return 0.5 * s;
}

double rho_of_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("rho_of_matrix: matrix not square");
  if (!m.allFinite()) throw std::invalid_argument("rho_of_matrix: non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw std::runtime_error("rho_of_matrix: eigensolver failed");
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i) s += std::abs(es.eigenvalues()[i].real());
  return 0.5 * s;
}

namespace {

std::vector<Eigen::MatrixXd> sl_basis(int n) {
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  for (int i = 0; i + 1 < n; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(i, i) = 1.0;
    e(i + 1, i + 1) = -1.0;
    basis.push_back(e);
  }
  return basis;
}

}  // namespace

AdjointResult adjoint_weight_system(const std::vector<Eigen::MatrixXd>& h_basis,
                                    const std::vector<Eigen::MatrixXd>& cartan_basis,
                                    AdjointSpace on_space, const AdjointOptions& opts) {
  const int nc = static_cast<int>(cartan_basis.size());
  if (h_basis.empty() && on_space == AdjointSpace::kSelf)
    throw std::invalid_argument("adjoint_weight_system: empty h basis");
  const int n = static_cast<int>((h_basis.empty() ? cartan_basis : h_basis)[0].rows());

  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) {
      Eigen::MatrixXd c = cartan_basis[i] * cartan_basis[j] - cartan_basis[j] * cartan_basis[i];
      if (c.norm() > opts.commute_tol)
        throw std::invalid_argument("adjoint_weight_system: cartan basis does not commute");
    }

  std::vector<Eigen::MatrixXd> space =
      on_space == AdjointSpace::kSelf ? h_basis : sl_basis(n);
  const int m = static_cast<int>(space.size());

  if (nc == 0) {
    // Convention: no split directions, everything is the zero weight space.
    return {rootdata::WeightSystem(0, {}, m), {}};
  }

  Eigen::MatrixXd bmat(n * n, m);
  for (int j = 0; j < m; ++j)
    bmat.col(j) = Eigen::Map<const Eigen::VectorXd>(space[j].data(), n * n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> coords(bmat);

  // Matrices of ad(C_k) acting on the chosen space.
  std::vector<Eigen::MatrixXd> ad(nc, Eigen::MatrixXd(m, m));
  for (int k = 0; k < nc; ++k) {
    for (int j = 0; j < m; ++j) {
      Eigen::MatrixXd br = cartan_basis[k] * space[j] - space[j] * cartan_basis[k];
      Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(br.data(), n * n);
      Eigen::VectorXd c = coords.solve(rhs);
      if ((bmat * c - rhs).norm() > 1e-7)
        throw std::invalid_argument("adjoint_weight_system: space is not ad-stable");
      ad[k].col(j) = c;
    }
  }

  double scale = 1.0;
  for (int k = 0; k < nc; ++k) scale = std::max(scale, ad[k].norm());

  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    Rng rng(opts.seed + static_cast<uint64_t>(attempt) * 0x51ed2701);
    Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < nc; ++k) {
      double coeff = 1.0 + static_cast<double>(rng.below(997)) / 31.0;
      combo += coeff * ad[k];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(combo, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) continue;

    double imag_max = 0.0;
    for (int i = 0; i < m; ++i) imag_max = std::max(imag_max, std::abs(es.eigenvalues()[i].imag()));
    if (imag_max > opts.real_tol * std::max(1.0, scale)) {
      if (attempt + 1 == opts.max_retries)
        throw std::invalid_argument("adjoint_weight_system: joint spectrum is not real");
      continue;
    }

    // Group the eigenvalues of the combination.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return es.eigenvalues()[a].real() < es.eigenvalues()[b].real();
    });
    const double group_tol = 1e-8 * std::max(1.0, scale);
    std::vector<std::vector<int>> groups;
    for (int idx : order) {
      double v = es.eigenvalues()[idx].real();
      if (groups.empty() ||
          v - es.eigenvalues()[groups.back().front()].real() > group_tol)
        groups.emplace_back();
      groups.back().push_back(idx);
    }

    bool collision = false;
    std::vector<std::pair<Eigen::VectorXd, long>> group_weights;
    auto real_eigvec = [&](int col) {
      Eigen::VectorXd re = es.eigenvectors().col(col).real();
      Eigen::VectorXd im = es.eigenvectors().col(col).imag();
      return re.norm() >= im.norm() ? re : im;
    };
    for (const auto& grp : groups) {
      Eigen::VectorXd mu(nc);
      // Every eigenvector of the group must carry the same joint weight;
      // otherwise the random combination was degenerate and we retry.
      for (size_t gi = 0; gi < grp.size() && !collision; ++gi) {
        Eigen::VectorXd v = real_eigvec(grp[gi]);
        if (v.norm() < 1e-12) { collision = true; break; }
        for (int k = 0; k < nc; ++k) {
          Eigen::VectorXd av = ad[k] * v;
          double lambda = v.dot(av) / v.dot(v);
          if ((av - lambda * v).norm() > 1e-6 * std::max(1.0, scale) * v.norm()) {
            collision = true;
            break;
          }
          if (gi == 0)
            mu[k] = lambda;
          else if (std::abs(mu[k] - lambda) > 1e-6 * std::max(1.0, scale))
            collision = true;
        }
      }
      if (collision) break;
      group_weights.emplace_back(mu, static_cast<long>(grp.size()));
    }
    if (collision) continue;

    std::vector<rootdata::Weight> exact_weights;
    std::vector<InexactWeight> inexact;
    long zero_mult = 0;
    for (auto& [mu, mult] : group_weights) {
      RatVec cv(nc);
      bool ok = true;
      for (int k = 0; k < nc; ++k) {
        auto r = Rat::approximate(mu[k], opts.max_denominator, opts.rationalize_tol);
        if (!r) { ok = false; break; }
        cv[k] = *r;
      }
      if (!ok) {
        inexact.push_back({mu, mult});
        continue;
      }
      bool zero = true;
      for (const Rat& c : cv)
        if (!c.is_zero()) { zero = false; break; }
      if (zero)
        zero_mult += mult;
      else
        exact_weights.push_back({cv, mult});
    }
    long inexact_total = 0;
    for (const auto& iw : inexact) inexact_total += iw.multiplicity;
    rootdata::WeightSystem sys(nc, std::move(exact_weights), zero_mult,
                               inexact.empty() ? std::optional<long>(m) : std::nullopt);
    if (!inexact.empty() && sys.total_multiplicity() + inexact_total != m)
      throw std::runtime_error("adjoint_weight_system: multiplicity bookkeeping failed");
    return {std::move(sys), std::move(inexact)};
  }
  throw std::runtime_error("adjoint_weight_system: no generic combination found");
}

}  // namespace temperlab::rhofun
