#include "temperlab/matgroup.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace temperlab::matgroup {

namespace {

Eigen::MatrixXd to_double(const RatMat& m) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = m[i][j].to_double();
  return d;
}

}  // namespace

GroupElement GroupElement::identity(int n) {
  if (n < 2) throw std::invalid_argument("GroupElement: n must be >= 2");
  RatMat m(n, RatVec(n, Rat(0)));
  for (int i = 0; i < n; ++i) m[i][i] = Rat(1);
  return from_rational(m);
}

GroupElement GroupElement::from_matrix(const Eigen::MatrixXd& m, double det_tol) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw std::invalid_argument("GroupElement: need a square matrix, n >= 2");
  if (!m.allFinite()) throw std::runtime_error("GroupElement: non-finite entries");
  double det = m.determinant();
  if (std::abs(det - 1.0) > det_tol)
    throw std::invalid_argument("GroupElement: determinant " + std::to_string(det) + " != 1");
  GroupElement g;
  g.mat_ = m;
  return g;
}

GroupElement GroupElement::from_rational(const RatMat& m) {
  const int n = static_cast<int>(m.size());
  if (n < 2) throw std::invalid_argument("GroupElement: n must be >= 2");
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("GroupElement: ragged matrix");
  if (ratlinalg::determinant(m) != Rat(1))
    throw std::invalid_argument("GroupElement: exact determinant != 1");
  GroupElement g;
  g.exact_ = m;
  g.mat_ = to_double(m);
  return g;
}

const RatMat& GroupElement::rational() const {
  if (exact_.empty()) throw std::logic_error("GroupElement: not in exact mode");
  return exact_;
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (n() != other.n()) throw std::invalid_argument("GroupElement: rank mismatch");
  GroupElement g;
  g.mat_ = mat_ * other.mat_;
  if (exact() && other.exact()) {
    const int m = n();
    g.exact_.assign(m, RatVec(m, Rat(0)));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        if (exact_[i][k].is_zero()) continue;
        for (int j = 0; j < m; ++j) g.exact_[i][j] += exact_[i][k] * other.exact_[k][j];
      }
    g.mat_ = to_double(g.exact_);
  }
  return g;
}

GroupElement GroupElement::inverse() const {
  GroupElement g;
  if (exact()) {
    g.exact_ = ratlinalg::inverse(exact_);
    g.mat_ = to_double(g.exact_);
  } else {
    g.mat_ = mat_.inverse();
  }
  return g;
}

CartanVector::CartanVector(Eigen::VectorXd coords, double trace_tol) : coords_(std::move(coords)) {
  if (!coords_.allFinite()) throw std::runtime_error("CartanVector: non-finite coordinates");
  if (std::abs(coords_.sum()) > trace_tol)
    throw std::invalid_argument("CartanVector: coordinates must sum to zero");
}

bool CartanVector::is_dominant(double tol) const {
  for (int i = 0; i + 1 < coords_.size(); ++i)
    if (coords_[i] < coords_[i + 1] - tol) return false;
  return true;
}

CartanVector CartanVector::reversed_negated() const {
  Eigen::VectorXd v(coords_.size());
  for (int i = 0; i < coords_.size(); ++i) v[i] = -coords_[coords_.size() - 1 - i];
  return CartanVector(std::move(v));
}

SubgroupSpec SubgroupSpec::discrete(int n, std::vector<GroupElement> gens) {
  if (gens.empty()) throw std::invalid_argument("SubgroupSpec: generator list is empty");
  bool exact = true;
  for (const auto& g : gens) {
    if (g.n() != n) throw std::invalid_argument("SubgroupSpec: generator rank mismatch");
    exact = exact && g.exact();
  }
  return {n, DiscreteGenerators{std::move(gens), exact}};
}

SubgroupSpec SubgroupSpec::block_reductive(int n, std::vector<int> sizes, std::vector<int> positions) {
  if (sizes.size() != positions.size() || sizes.empty())
    throw std::invalid_argument("SubgroupSpec: sizes/positions mismatch");
  std::vector<std::pair<int, int>> spans;
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || positions[i] < 0 || positions[i] + sizes[i] > n)
      throw std::invalid_argument("SubgroupSpec: block outside the ambient rank");
    spans.emplace_back(positions[i], positions[i] + sizes[i]);
  }
  std::sort(spans.begin(), spans.end());
  for (size_t i = 1; i < spans.size(); ++i)
    if (spans[i].first < spans[i - 1].second)
      throw std::invalid_argument("SubgroupSpec: overlapping blocks");
  return {n, BlockReductive{std::move(sizes), std::move(positions)}};
}

CartanVector cartan_projection(const GroupElement& g) {
  if (!g.mat().allFinite()) throw std::runtime_error("cartan_projection: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g.mat());
  Eigen::VectorXd sigma = svd.singularValues();
  const int n = g.n();
  Eigen::VectorXd logs(n);
  for (int i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0)) throw std::runtime_error("cartan_projection: singular value <= 0");
    logs[i] = std::log(sigma[i]);
  }
  std::sort(logs.data(), logs.data() + n, std::greater<double>());
  logs.array() -= logs.sum() / n;  // remove float drift from det ~ 1
  return CartanVector(std::move(logs));
}

IwasawaFactors iwasawa_factor(const GroupElement& g) {
  const int n = g.n();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g.mat());
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) == 0.0) throw std::runtime_error("iwasawa_factor: rank-deficient input");
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  IwasawaFactors f;
  f.k = q;
  f.eta.resize(n);
  for (int i = 0; i < n; ++i) f.eta[i] = std::log(r(i, i));
  f.eta.array() -= f.eta.sum() / n;
  f.nu = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) f.nu(i, j) = r(i, j) / r(i, i);
  return f;
}

CartanVector iwasawa_projection(const GroupElement& g) {
  return CartanVector(iwasawa_factor(g).eta);
}

std::vector<Eigen::MatrixXd> lie_basis(const SubgroupSpec& spec) {
  const int n = spec.n;
  std::vector<Eigen::MatrixXd> basis;
  auto unit = [n](int i, int j) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(i, j) = 1.0;
    return e;
  };
  if (std::holds_alternative<DiagonalTorus>(spec.variant)) {
    for (int i = 0; i + 1 < n; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      e(i, i) = 1.0;
      e(i + 1, i + 1) = -1.0;
      basis.push_back(e);
    }
    return basis;
  }
  if (std::holds_alternative<UpperUnipotent>(spec.variant)) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) basis.push_back(unit(i, j));
    return basis;
  }
  if (const auto* br = std::get_if<BlockReductive>(&spec.variant)) {
    for (size_t b = 0; b < br->sizes.size(); ++b) {
      const int p = br->positions[b], k = br->sizes[b];
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          if (i != j) basis.push_back(unit(p + i, p + j));
      for (int i = 0; i + 1 < k; ++i) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
        e(p + i, p + i) = 1.0;
        e(p + i + 1, p + i + 1) = -1.0;
        basis.push_back(e);
      }
    }
    return basis;
  }
  throw std::invalid_argument("lie_basis: unsupported subgroup variant");
}

std::vector<Eigen::MatrixXd> cartan_subspace_basis(const SubgroupSpec& spec) {
  const int n = spec.n;
  std::vector<Eigen::MatrixXd> basis;
  if (std::holds_alternative<DiagonalTorus>(spec.variant)) {
    return lie_basis(spec);
  }
  if (std::holds_alternative<UpperUnipotent>(spec.variant)) {
    return {};  // nilpotent: no nonzero split semisimple elements
  }
  if (const auto* br = std::get_if<BlockReductive>(&spec.variant)) {
    for (size_t b = 0; b < br->sizes.size(); ++b) {
      const int p = br->positions[b], k = br->sizes[b];
      for (int i = 0; i + 1 < k; ++i) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
        e(p + i, p + i) = 1.0;
        e(p + i + 1, p + i + 1) = -1.0;
        basis.push_back(e);
      }
    }
    return basis;
  }
  throw std::invalid_argument("cartan_subspace_basis: unsupported subgroup variant");
}

Eigen::VectorXd modular_character(const SubgroupSpec& spec) {
  if (std::holds_alternative<DiscreteGenerators>(spec.variant))
    throw std::invalid_argument(
        "modular_character: unsupported for discrete subgroups (counting measure is symmetric)");
  auto basis = lie_basis(spec);
  const int m = static_cast<int>(basis.size());
  const int n = spec.n;
  // Coordinates of [b_i, b_j] in the basis, via least squares on vectorized
  // matrices; the residual check guards against a non-closed basis.
  Eigen::MatrixXd bmat(n * n, m);
  for (int j = 0; j < m; ++j)
    bmat.col(j) = Eigen::Map<const Eigen::VectorXd>(basis[j].data(), n * n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> solver(bmat);
  Eigen::VectorXd chi(m);
  for (int i = 0; i < m; ++i) {
    double trace = 0.0;
    for (int j = 0; j < m; ++j) {
      Eigen::MatrixXd br = basis[i] * basis[j] - basis[j] * basis[i];
      Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(br.data(), n * n);
      Eigen::VectorXd c = solver.solve(rhs);
      if ((bmat * c - rhs).norm() > 1e-8)
        throw std::runtime_error("modular_character: basis not closed under bracket");
      trace += c[j];
    }
    chi[i] = -trace;
  }
  return chi;
}

int chart_dim(int n) { return n * (n - 1) + (n - 1); }

ChartBox ChartBox::cube(int n, double half_width) {
  ChartBox b;
  b.n = n;
  const int d = chart_dim(n);
  b.lo = Eigen::VectorXd::Constant(d, -half_width);
  b.hi = Eigen::VectorXd::Constant(d, half_width);
  return b;
}

GroupElement chart_point(int n, const Eigen::VectorXd& params) {
  if (params.size() != chart_dim(n)) throw std::invalid_argument("chart_point: bad parameter count");
  const int low = n * (n - 1) / 2;
  Eigen::MatrixXd nbar = Eigen::MatrixXd::Identity(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) nbar(i, j) = params[idx++];
  Eigen::VectorXd x(n);
  double sum = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    x[i] = params[low + i];
    sum += x[i];
  }
  x[n - 1] = -sum;
  Eigen::MatrixXd upper = Eigen::MatrixXd::Identity(n, n);
  idx = low + (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper(i, j) = params[idx++];
  Eigen::MatrixXd a = x.array().exp().matrix().asDiagonal();
  return GroupElement::from_matrix(nbar * a * upper, 1e-6);
}

std::optional<Eigen::VectorXd> chart_factor(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  // Doolittle LU without pivoting: g = L . D . U exists on the open Bruhat
  // cell; positive pivots select the identity sheet of M.
  Eigen::MatrixXd a = g;
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
  for (int c = 0; c < n; ++c) {
    double pivot = a(c, c);
    if (!(std::abs(pivot) > 1e-13)) return std::nullopt;
    for (int i = c + 1; i < n; ++i) {
      double f = a(i, c) / pivot;
      l(i, c) = f;
      a.row(i).segment(c, n - c) -= f * a.row(c).segment(c, n - c);
    }
  }
  Eigen::VectorXd params(chart_dim(n));
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) params[idx++] = l(i, j);
  for (int i = 0; i < n; ++i)
    if (a(i, i) <= 0.0) return std::nullopt;  // other sign sheet
  for (int i = 0; i + 1 < n; ++i) params[idx++] = std::log(a(i, i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) params[idx++] = a(i, j) / a(i, i);
  return params;
}

bool chart_contains(const ChartBox& box, const Eigen::MatrixXd& g) {
  auto p = chart_factor(g);
  if (!p) return false;
  for (int i = 0; i < p->size(); ++i)
    if ((*p)[i] < box.lo[i] || (*p)[i] > box.hi[i]) return false;
  return true;
}

namespace {

// 2 rho in the free A-coordinates of the chart: 2 rho(x) with x_n = -sum.
Eigen::VectorXd haar_exponents(int n) {
  // rho(diag x) = sum (n+1-2i) x_i / 2, so 2 rho has coefficients n+1-2i.
  Eigen::VectorXd c(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    double ci = n + 1 - 2 * (i + 1);
    double cn = n + 1 - 2 * n;  // coefficient of x_n, substituted by -sum
    c[i] = ci - cn;
  }
  return c;
}

double exp_segment_integral(double gamma, double lo, double hi) {
  if (std::abs(gamma) < 1e-12) return hi - lo;
  return (std::exp(gamma * hi) - std::exp(gamma * lo)) / gamma;
}

}  // namespace

std::vector<WeightedSample> sample_box(const ChartBox& box, long count, uint64_t seed,
                                       Sampling mode) {
  if (count < 0) throw std::invalid_argument("sample_box: negative count");
  const int n = box.n;
  const int d = chart_dim(n);
  if (box.lo.size() != d || box.hi.size() != d)
    throw std::invalid_argument("sample_box: box dimension mismatch");
  for (int i = 0; i < d; ++i)
    if (!(box.lo[i] < box.hi[i])) throw std::invalid_argument("sample_box: empty box");

  const int low = n * (n - 1) / 2;
  Eigen::VectorXd gamma = haar_exponents(n);
  double lebesgue = 1.0;
  for (int i = 0; i < d; ++i) lebesgue *= box.hi[i] - box.lo[i];
  // Constant weight in tilted mode: the A-coordinates are drawn with
  // density proportional to exp(gamma . x), the Haar density in this chart.
  double tilted_weight = 1.0;
  for (int i = 0; i < low; ++i) tilted_weight *= box.hi[i] - box.lo[i];
  for (int i = 0; i + 1 < n; ++i)
    tilted_weight *= exp_segment_integral(gamma[i], box.lo[low + i], box.hi[low + i]);
  for (int i = low + n - 1; i < d; ++i) tilted_weight *= box.hi[i] - box.lo[i];

  std::vector<WeightedSample> out;
  out.reserve(static_cast<size_t>(count));
  for (long s = 0; s < count; ++s) {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(s));
    Eigen::VectorXd p(d);
    for (int i = 0; i < low; ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
    for (int i = 0; i + 1 < n; ++i) {
      double gl = gamma[i], lo = box.lo[low + i], hi = box.hi[low + i];
      double u = rng.uniform();
      if (mode == Sampling::kUniform || std::abs(gl) < 1e-12) {
        p[low + i] = lo + (hi - lo) * u;
      } else {
        // Inverse CDF of exp(gl * x) restricted to [lo, hi].
        double elo = std::exp(gl * lo), ehi = std::exp(gl * hi);
        p[low + i] = std::log(elo + u * (ehi - elo)) / gl;
      }
    }
    for (int i = low + n - 1; i < d; ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
    double weight = tilted_weight;
    if (mode == Sampling::kUniform) {
      double dens = 0.0;
      for (int i = 0; i + 1 < n; ++i) dens += gamma[i] * p[low + i];
      weight = lebesgue * std::exp(dens);
    }
    out.push_back({chart_point(n, p), weight, p});
  }
  return out;
}

double box_haar_volume(const ChartBox& box) {
  const int n = box.n;
  const int low = n * (n - 1) / 2;
  Eigen::VectorXd gamma = haar_exponents(n);
  double vol = 1.0;
  for (int i = 0; i < low; ++i) vol *= box.hi[i] - box.lo[i];
  for (int i = 0; i + 1 < n; ++i)
    vol *= exp_segment_integral(gamma[i], box.lo[low + i], box.hi[low + i]);
  for (int i = low + n - 1; i < box.dim(); ++i) vol *= box.hi[i] - box.lo[i];
  return vol;
}

Eigen::MatrixXd random_rotation(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gauss();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  if (q.determinant() < 0.0) q.col(n - 1) *= -1.0;
  return q;
}

SubgroupSpec read_generators_json(const ojson& j) {
  const int n = j.at("n").get<int>();
  const bool exact = j.value("exact", true);
  std::vector<GroupElement> gens;
  for (const auto& gm : j.at("gens")) {
    if (static_cast<int>(gm.size()) != n) throw std::invalid_argument("generators: bad row count");
    if (exact) {
      RatMat m(n, RatVec(n));
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m[i][k] = rat_from_json(gm[i][k]);
      gens.push_back(GroupElement::from_rational(m));
    } else {
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = gm[i][k].is_string()
                                                  ? Rat::parse(gm[i][k].get<std::string>()).to_double()
                                                  : gm[i][k].get<double>();
      gens.push_back(GroupElement::from_matrix(m));
    }
  }
  return SubgroupSpec::discrete(n, std::move(gens));
}

SubgroupSpec read_generators_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generators file: " + path);
  ojson j = ojson::parse(in);
  return read_generators_json(j);
}

}  // namespace temperlab::matgroup
