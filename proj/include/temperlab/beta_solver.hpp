#pragma once

#include <optional>
#include <string>
#include <vector>

#include "temperlab/json_io.hpp"
#include "temperlab/rootdata.hpp"

namespace temperlab::beta_solver {

// A pair of weight systems on a common parameter space: the numerator
// (subalgebra) weights and the denominator (ambient) weights of the ratio
// whose supremum is the local volume decay exponent.
struct PairSpec {
  int dim = 0;
  rootdata::WeightSystem h_system;
  rootdata::WeightSystem g_system;
  std::string label;
  // When set, the denominator may vanish on a nonzero subspace and the
  // 0/0 = 0 convention applies off the origin too.
  bool allow_degenerate_g = false;

  PairSpec(int dim, rootdata::WeightSystem h, rootdata::WeightSystem g, std::string label,
           bool allow_degenerate_g = false);

  ojson to_json() const;
  static PairSpec from_json(const ojson& j);
};

struct BetaResult {
  Rat beta;
  RatVec witness;          // zero vector when h_system is empty
  long rays_examined = 0;  // distinct canonical rays evaluated
  long subsets_examined = 0;
};

// Exact sup of rho_h / rho_g over nonzero points (0/0 = 0). Both functions
// are linear on each cone of the arrangement cut out by the weight kernels
// plus the coordinate hyperplanes, so the 0-homogeneous maximum is attained
// on an arrangement ray; rays are kernels of (d-1)-subsets of rank d-1.
BetaResult beta_exact(const PairSpec& pair);

inline constexpr long kMaxRaySubsets = 10'000'000;

// Max of the ratio over `samples` uniform unit directions; a lower bound of
// the exact value, converging as samples grow. Dimension 1 is exhaustive.
double beta_sample_oracle(const PairSpec& pair, long samples, uint64_t seed);

enum class Verdict { kTempered, kNotTempered, kBoundaryExact, kIndeterminate };

const char* verdict_name(Verdict v);

enum class ExponentKind { kDelta, kBetaReductive };

// Exact exponents: tempered iff value <= 1/2, the boundary case flagged.
Verdict verdict_from_exponent(const Rat& value, ExponentKind kind);
// Estimates: decided only when the error bar clears 1/2; values slightly
// above 1 are clamped.
Verdict verdict_from_exponent(double value, double error_bar, ExponentKind kind);

// p = 1/(1 - theta), with infinity at theta = 1.
double p_from_theta(double theta);
std::optional<Rat> p_from_theta(const Rat& theta);  // nullopt means infinity

struct ExponentReport {
  std::string label;
  std::optional<Rat> beta_exact_value;
  std::optional<double> beta_oracle;
  RatVec witness;
  std::optional<double> delta;
  std::optional<std::pair<double, double>> delta_bracket;
  std::optional<double> theta_hat;
  std::optional<double> theta_residual;
  double p = 1.0;                   // from the reported exponent
  std::optional<Rat> p_exact;       // when derived from an exact beta
  bool p_infinite = false;
  Verdict verdict = Verdict::kIndeterminate;
  std::string identity_used;        // "theorem-a" or "proposition-b"
  ojson method;                     // ray counts, depths, seeds, tolerances

  ojson to_json() const;
};

}  // namespace temperlab::beta_solver
