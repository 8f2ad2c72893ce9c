#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "temperlab/json_io.hpp"
#include "temperlab/ratlinalg.hpp"
#include "temperlab/rational.hpp"
#include "temperlab/rng.hpp"

namespace temperlab::matgroup {

inline constexpr double kDefaultDetTol = 1e-9;

// Element of SL(n,R). Entries are always held as doubles; elements built
// from rational data additionally carry exact entries, which the orbit
// enumeration uses for exact deduplication and exact inverses.
class GroupElement {
 public:
  static GroupElement identity(int n);
  static GroupElement from_matrix(const Eigen::MatrixXd& m, double det_tol = kDefaultDetTol);
  static GroupElement from_rational(const RatMat& m);

  int n() const { return static_cast<int>(mat_.rows()); }
  bool exact() const { return !exact_.empty(); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  const RatMat& rational() const;

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;

 private:
  GroupElement() = default;
  Eigen::MatrixXd mat_;
  RatMat exact_;  // empty in floating mode
};

// Point of the Cartan subspace: length-n coordinates summing to zero.
class CartanVector {
 public:
  explicit CartanVector(Eigen::VectorXd coords, double trace_tol = kDefaultDetTol);
  const Eigen::VectorXd& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double norm() const { return coords_.norm(); }
  bool is_dominant(double tol = 0.0) const;
  // kappa(g^{-1}) in terms of kappa(g): negate and reverse.
  CartanVector reversed_negated() const;

 private:
  Eigen::VectorXd coords_;
};

struct DiscreteGenerators {
  std::vector<GroupElement> generators;
  bool exact = true;
};
struct BlockReductive {
  std::vector<int> sizes;
  std::vector<int> positions;  // starting row/col of each block
};
struct DiagonalTorus {};
struct UpperUnipotent {};
struct CatalogName {
  std::string name;
};

struct SubgroupSpec {
  int n = 2;
  std::variant<DiscreteGenerators, BlockReductive, DiagonalTorus, UpperUnipotent, CatalogName> variant;

  static SubgroupSpec discrete(int n, std::vector<GroupElement> gens);
  static SubgroupSpec block_reductive(int n, std::vector<int> sizes, std::vector<int> positions);
  static SubgroupSpec diagonal_torus(int n) { return {n, DiagonalTorus{}}; }
  static SubgroupSpec upper_unipotent(int n) { return {n, UpperUnipotent{}}; }
};

// Sorted logs of singular values; dominant and traceless.
CartanVector cartan_projection(const GroupElement& g);

// g = k. exp(eta). nu with k orthogonal, nu upper unipotent.
struct IwasawaFactors {
  Eigen::MatrixXd k;
  Eigen::VectorXd eta;
  Eigen::MatrixXd nu;
};
IwasawaFactors iwasawa_factor(const GroupElement& g);
CartanVector iwasawa_projection(const GroupElement& g);

// Basis of the Lie algebra of the subgroup, as n x n matrices.
std::vector<Eigen::MatrixXd> lie_basis(const SubgroupSpec& spec);
// Basis of a maximal split abelian subalgebra (diagonal matrices here);
// empty for the unipotent variant.
std::vector<Eigen::MatrixXd> cartan_subspace_basis(const SubgroupSpec& spec);
// The linear form Y -> -trace(ad_h Y) in lie_basis coordinates. Zero for
// every supported variant; DiscreteGenerators is rejected.
Eigen::VectorXd modular_character(const SubgroupSpec& spec);

// Coordinate box in the open chart nbar(v) . a(x) . n(u): v runs over the
// strict lower entries (row-major), x over the first n-1 log-diagonal
// coordinates, u over the strict upper entries (row-major).
struct ChartBox {
  int n = 2;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static ChartBox cube(int n, double half_width);
  int dim() const { return static_cast<int>(lo.size()); }
};

int chart_dim(int n);
GroupElement chart_point(int n, const Eigen::VectorXd& params);
// LDU factorization into chart coordinates; nullopt when g is off the open
// cell or on another sign sheet.
std::optional<Eigen::VectorXd> chart_factor(const Eigen::MatrixXd& g);
bool chart_contains(const ChartBox& box, const Eigen::MatrixXd& g);

struct WeightedSample {
  GroupElement g;
  double weight;  // reciprocal sampling density w.r.t. Haar measure
  Eigen::VectorXd params;
};

// kHaarTilted draws the A-coordinates proportional to the Haar density
// (constant weights, best for volume mass); kUniform draws every chart
// coordinate uniformly (weights carry the density, best for statistics
// concentrated in the low-density tail).
enum class Sampling { kHaarTilted, kUniform };

// Deterministic stream for (seed, count): same seed, same samples.
std::vector<WeightedSample> sample_box(const ChartBox& box, long count, uint64_t seed,
                                       Sampling mode = Sampling::kHaarTilted);

// Exact Haar measure of a chart box (product of 1-D integrals).
double box_haar_volume(const ChartBox& box);

// Haar-random SO(n) matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_rotation(int n, Rng& rng);

// Generators file: {"n": int, "exact": bool, "gens": [[[entry, ...], ...], ...]}
// with entries given as numbers or "p/q" strings.
SubgroupSpec read_generators_json(const ojson& j);
SubgroupSpec read_generators_file(const std::string& path);

}  // namespace temperlab::matgroup
