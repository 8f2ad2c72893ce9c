#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "temperlab/json_io.hpp"
#include "temperlab/matgroup.hpp"
#include "temperlab/ratlinalg.hpp"
#include "temperlab/rational.hpp"

namespace temperlab::rootdata {

struct Weight {
  RatVec covector;
  long multiplicity = 1;
};

// Finite multiset of rational covectors on R^d plus the dimension of the
// joint kernel weight space. Duplicate covectors merge on construction and
// zero covectors fold into zero_multiplicity.
class WeightSystem {
 public:
  WeightSystem(int dim, std::vector<Weight> weights, long zero_multiplicity,
               std::optional<long> represented_dim = std::nullopt);

  int dim() const { return dim_; }
  const std::vector<Weight>& weights() const { return weights_; }
  long zero_multiplicity() const { return zero_mult_; }
  long total_multiplicity() const;
  bool empty() const { return weights_.empty(); }

  // Every covector occurs with its negative at equal multiplicity.
  bool is_symmetric() const;

  ojson to_json() const;
  static WeightSystem from_json(const ojson& j);

  friend bool operator==(const WeightSystem&, const WeightSystem&);

 private:
  int dim_;
  std::vector<Weight> weights_;
  long zero_mult_;
};

// Restricted roots e_i - e_j of sl(n,R) on the full n diagonal coordinates
// (covectors canonicalized to sum zero); zero_multiplicity = n - 1.
WeightSystem restricted_roots(int n);

// Half sum of positive roots, canonical sum-zero covector of length n.
RatVec rho_form(int n);

// Covector applied to a coordinate vector.
double apply_covector(const RatVec& covector, const Eigen::VectorXd& x);
Rat apply_covector(const RatVec& covector, const RatVec& x);

// Subtract the mean so the covector is well-defined on the traceless space.
RatVec canonicalize_covector(RatVec v);

matgroup::CartanVector dominant_representative(const matgroup::CartanVector& x);

// prod_{i<j} sinh(x_i - x_j) for dominant X; the KAK Jacobian of SL(n,R).
double kak_density(const matgroup::CartanVector& x, int n);

// Pull covectors back through an embedding whose columns express a basis of
// the subspace in the ambient coordinates. rows(embedding) = ws.dim().
WeightSystem restrict_weights(const WeightSystem& ws, const RatMat& embedding);

}  // namespace temperlab::rootdata
