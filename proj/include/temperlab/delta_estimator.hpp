#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "temperlab/beta_solver.hpp"
#include "temperlab/matgroup.hpp"

namespace temperlab::delta_estimator {

struct OrbitElement {
  matgroup::GroupElement g;
  int word_length = 0;
  double s_value = 0.0;  // 2 rho kappa(g), the canonical radius
};

// Deduplicated ball of words of length <= depth in the generators and their
// inverses. Elements are sorted by (word_length, discovery order) so a
// prefix up to any smaller depth is itself a ball.
class OrbitBall {
 public:
  OrbitBall(std::vector<OrbitElement> elements, int depth, uint64_t fingerprint, bool truncated)
      : elements_(std::move(elements)), depth_(depth), fingerprint_(fingerprint), truncated_(truncated) {}

  const std::vector<OrbitElement>& elements() const { return elements_; }
  int depth() const { return depth_; }
  uint64_t generator_fingerprint() const { return fingerprint_; }
  bool truncated() const { return truncated_; }
  long size() const { return static_cast<long>(elements_.size()); }
  long size_at_depth(int depth) const;

 private:
  std::vector<OrbitElement> elements_;
  int depth_;
  uint64_t fingerprint_;
  bool truncated_;
};

struct EnumerationOptions {
  long max_elements = 5'000'000;
  double dedup_grid = 1e-9;     // float-mode rounding grid
  double collision_audit = 1e-7;
};

OrbitBall enumerate_ball(const matgroup::SubgroupSpec& gens, int depth,
                         const EnumerationOptions& opts = {});

// sum over the ball of exp(-t * s(gamma)).
double poincare_partial(const OrbitBall& ball, double t);

struct AbscissaEstimate {
  enum class Status { kOk, kIndeterminate, kTruncated };

  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Status status = Status::kIndeterminate;
  std::vector<int> depth_schedule;
  std::vector<std::pair<double, long>> shells;  // (R, N(R)) at the deepest ball
  ojson diagnostics;

  ojson to_json() const;
};

// Growth exponent of a discrete subgroup from shell counts N(R) with
// R = 2 rho kappa, fitted over the largest reliable window (drop the
// smallest 30% and largest 10% of shells).
AbscissaEstimate delta_discrete(const matgroup::SubgroupSpec& gens,
                                const std::vector<int>& depth_schedule,
                                const EnumerationOptions& opts = {});

inline constexpr double kGrowthIndicatorEmpty = -std::numeric_limits<double>::infinity();

// Direction-restricted orbit growth rate: psi(direction) in the
// normalization psi(X) = ||X|| * (fitted rate per unit norm). Returns the
// -infinity sentinel when the cone stays empty at this depth.
double growth_indicator(const matgroup::SubgroupSpec& gens, const matgroup::CartanVector& direction,
                        double aperture, int depth, const EnumerationOptions& opts = {});

struct ReductiveQuadratureOptions {
  long value_directions = 65536;   // sphere samples for the ray-rate maximum
  long bracket_directions = 192;   // directions used in the truncated integrals
  long radial_nodes = 400;
  uint64_t seed = 1;
};

// Abscissa of the KAK-radial integral of a reductive subgroup: along a unit
// direction u the ray integral converges iff t > rho_h(u)/rho_g(u), so the
// abscissa is the max ray rate; brackets come from truncated integrals on
// the t grid. The embedding maps subgroup Cartan coordinates into the full
// diagonal coordinates of the ambient group.
AbscissaEstimate delta_reductive_quadrature(const beta_solver::PairSpec& pair,
                                            const RatMat& embedding, int ambient_n,
                                            const std::vector<double>& t_grid, double truncation,
                                            const ReductiveQuadratureOptions& opts = {});

}  // namespace temperlab::delta_estimator
