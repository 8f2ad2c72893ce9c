#include "temperlab/rootdata.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace temperlab::rootdata {

namespace {

bool covector_less(const RatVec& a, const RatVec& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return false;
}

bool is_zero_vec(const RatVec& v) {
  for (const Rat& x : v)
    if (!x.is_zero()) return false;
  return true;
}

}  // namespace

WeightSystem::WeightSystem(int dim, std::vector<Weight> weights, long zero_multiplicity,
                           std::optional<long> represented_dim)
    : dim_(dim), zero_mult_(zero_multiplicity) {
  if (dim < 0) throw std::invalid_argument("WeightSystem: negative dimension");
  if (zero_multiplicity < 0) throw std::invalid_argument("WeightSystem: negative zero multiplicity");
  std::map<RatVec, long, bool (*)(const RatVec&, const RatVec&)> merged(covector_less);
  for (auto& w : weights) {
    if (static_cast<int>(w.covector.size()) != dim)
      throw std::invalid_argument("WeightSystem: covector dimension mismatch");
    if (w.multiplicity < 1) throw std::invalid_argument("WeightSystem: multiplicity must be >= 1");
    if (is_zero_vec(w.covector)) {
      zero_mult_ += w.multiplicity;
      continue;
    }
    merged[w.covector] += w.multiplicity;
  }
  for (auto& [cv, m] : merged) weights_.push_back({cv, m});
  if (represented_dim && total_multiplicity() != *represented_dim)
    throw std::invalid_argument("WeightSystem: multiplicities do not fill the represented space");
}

long WeightSystem::total_multiplicity() const {
  long t = zero_mult_;
  for (const auto& w : weights_) t += w.multiplicity;
  return t;
}

bool WeightSystem::is_symmetric() const {
  for (const auto& w : weights_) {
    RatVec neg(w.covector.size());
    for (size_t i = 0; i < neg.size(); ++i) neg[i] = -w.covector[i];
    bool found = false;
    for (const auto& o : weights_)
      if (o.covector == neg && o.multiplicity == w.multiplicity) { found = true; break; }
    if (!found) return false;
  }
  return true;
}

bool operator==(const WeightSystem& a, const WeightSystem& b) {
  if (a.dim_ != b.dim_ || a.zero_mult_ != b.zero_mult_ || a.weights_.size() != b.weights_.size())
    return false;
  for (size_t i = 0; i < a.weights_.size(); ++i)
    if (a.weights_[i].covector != b.weights_[i].covector ||
        a.weights_[i].multiplicity != b.weights_[i].multiplicity)
      return false;
  return true;
}

ojson WeightSystem::to_json() const {
  ojson j;
  j["dim"] = dim_;
  j["zero_mult"] = zero_mult_;
  ojson ws = ojson::array();
  for (const auto& w : weights_) {
    ojson e;
    e["w"] = ratvec_to_json(w.covector);
    e["m"] = w.multiplicity;
    ws.push_back(e);
  }
  j["weights"] = ws;
  return j;
}

WeightSystem WeightSystem::from_json(const ojson& j) {
  std::vector<Weight> ws;
  for (const auto& e : j.at("weights"))
    ws.push_back({ratvec_from_json(e.at("w")), e.at("m").get<long>()});
  return WeightSystem(j.at("dim").get<int>(), std::move(ws), j.at("zero_mult").get<long>());
}

WeightSystem restricted_roots(int n) {
  if (n < 2) throw std::invalid_argument("restricted_roots: n must be >= 2");
  std::vector<Weight> ws;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      RatVec cv(n, Rat(0));
      cv[i] = Rat(1);
      cv[j] = Rat(-1);
      ws.push_back({cv, 1});
    }
  return WeightSystem(n, std::move(ws), n - 1, static_cast<long>(n) * n - 1);
}

RatVec rho_form(int n) {
  if (n < 2) throw std::invalid_argument("rho_form: n must be >= 2");
  RatVec rho(n, Rat(0));
  for (int i = 0; i < n; ++i) rho[i] = Rat(n + 1 - 2 * (i + 1), 2);
  return rho;  // already sums to zero
}

double apply_covector(const RatVec& covector, const Eigen::VectorXd& x) {
  if (static_cast<int>(covector.size()) != x.size())
    throw std::invalid_argument("apply_covector: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += covector[i].to_double() * x[i];
  return s;
}

Rat apply_covector(const RatVec& covector, const RatVec& x) {
  if (covector.size() != x.size()) throw std::invalid_argument("apply_covector: dimension mismatch");
  Rat s(0);
  for (size_t i = 0; i < x.size(); ++i) s += covector[i] * x[i];
  return s;
}

RatVec canonicalize_covector(RatVec v) {
  Rat mean(0);
  for (const Rat& x : v) mean += x;
  mean = mean / Rat(static_cast<long long>(v.size()));
  for (Rat& x : v) x -= mean;
  return v;
}

matgroup::CartanVector dominant_representative(const matgroup::CartanVector& x) {
  Eigen::VectorXd v = x.coords();
  std::stable_sort(v.data(), v.data() + v.size(), std::greater<double>());
  return matgroup::CartanVector(std::move(v));
}

double kak_density(const matgroup::CartanVector& x, int n) {
  if (x.dim() != n) throw std::invalid_argument("kak_density: dimension mismatch");
  if (!x.is_dominant(1e-12)) throw std::domain_error("kak_density: X must be dominant");
  double p = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) p *= std::sinh(x.coords()[i] - x.coords()[j]);
  return p;
}

WeightSystem restrict_weights(const WeightSystem& ws, const RatMat& embedding) {
  if (static_cast<int>(embedding.size()) != ws.dim())
    throw std::invalid_argument("restrict_weights: embedding rows != system dimension");
  const int target = embedding.empty() ? 0 : static_cast<int>(embedding[0].size());
  for (const auto& row : embedding)
    if (static_cast<int>(row.size()) != target)
      throw std::invalid_argument("restrict_weights: ragged embedding");
  std::vector<Weight> out;
  long extra_zero = 0;
  for (const auto& w : ws.weights()) {
    RatVec pulled(target, Rat(0));
    for (int j = 0; j < target; ++j)
      for (int i = 0; i < ws.dim(); ++i) pulled[j] += w.covector[i] * embedding[i][j];
    bool zero = true;
    for (const Rat& x : pulled)
      if (!x.is_zero()) { zero = false; break; }
    if (zero)
      extra_zero += w.multiplicity;
    else
      out.push_back({pulled, w.multiplicity});
  }
  return WeightSystem(target, std::move(out), ws.zero_multiplicity() + extra_zero);
}

}  // namespace temperlab::rootdata
