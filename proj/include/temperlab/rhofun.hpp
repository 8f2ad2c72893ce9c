#pragma once

#include <vector>

#include <Eigen/Dense>

#include "temperlab/rootdata.hpp"

namespace temperlab::rhofun {

// Half sum of |weight values|: nonnegative, convex, even, positively
// homogeneous, piecewise linear on the kernel arrangement of its weights.
class RhoFunction {
 public:
  explicit RhoFunction(rootdata::WeightSystem system) : system_(std::move(system)) {}

  const rootdata::WeightSystem& system() const { return system_; }
  int dim() const { return system_.dim(); }

  Rat eval(const RatVec& x) const;
  double eval(const Eigen::VectorXd& x) const;

  // (1/2) sum m_i ||lambda_i||_2, a global Lipschitz constant.
  double lipschitz_bound() const;

 private:
  rootdata::WeightSystem system_;
};

// (1/2) sum |Re lambda| over the complex eigenvalues of M.
double rho_of_matrix(const Eigen::MatrixXd& m);

enum class AdjointSpace { kSelf, kAmbient };

struct AdjointOptions {
  double commute_tol = 1e-9;
  double real_tol = 1e-7;
  double collision_tol = 1e-10;
  long max_denominator = 64;
  double rationalize_tol = 1e-9;
  int max_retries = 8;
  uint64_t seed = 0x9d5f;
};

struct InexactWeight {
  Eigen::VectorXd covector;
  long multiplicity;
};

struct AdjointResult {
  rootdata::WeightSystem system;
  std::vector<InexactWeight> inexact;  // weights that did not rationalize
  bool exact() const { return inexact.empty(); }
};

// Joint weights of ad(cartan_basis) on span(h_basis) (kSelf) or on all of
// sl(n) (kAmbient), as covectors in cartan_basis coordinates. Uses the
// eigenspaces of a generic random rational combination, retrying on
// eigenvalue collisions.
AdjointResult adjoint_weight_system(const std::vector<Eigen::MatrixXd>& h_basis,
                                    const std::vector<Eigen::MatrixXd>& cartan_basis,
                                    AdjointSpace on_space, const AdjointOptions& opts = {});

}  // namespace temperlab::rhofun
