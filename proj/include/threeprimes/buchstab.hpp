#pragma once

#include <cstddef>
#include <vector>

namespace threeprimes::buchstab {

// Buchstab's function omega(u), u >= 1: omega(u) = 1/u on [1,2] and
// (u omega(u))' = omega(u-1) beyond. Samples live on a grid aligned with the
// integers so that every kink of omega is a grid point.
struct BuchstabTable {
  double u_max = 0.0;
  double step = 0.0;
  std::vector<double> values;  // values[i] = omega(1 + i*step)
  double solver_error = 0.0;   // from Romberg level comparison
  double interp_error = 0.0;   // from fourth differences
  double err_bound = 0.0;      // solver_error + interp_error

  double u_at(std::size_t i) const { return 1.0 + static_cast<double>(i) * step; }
  std::size_t steps_per_unit() const;
};

// Integrates u*omega(u) = u0*omega(u0) + int omega(t-1) dt by the trapezoidal
// rule at step, step/2 and step/4 and Romberg-extrapolates onto the coarse
// grid. step is snapped down to 1/ceil(1/step).
// Throws std::invalid_argument on bad arguments and NumericError when the
// a posteriori bound exceeds 1e-9 on [1,4].
BuchstabTable build_table(double u_max, double step = 1e-3);

// Cubic interpolation with the stencil kept inside the unit interval holding u.
// Throws std::out_of_range outside [1, u_max].
double eval(const BuchstabTable& table, double u);

struct AlphaPlusBreakdown {
  double term1 = 0.0;  // 4 omega(4)
  double term2 = 0.0;  // triple integral over 1/10 < b1 < b2 < b3 < 1/4
};

struct AlphaPlusResult {
  double value = 0.0;
  double quadrature_error = 0.0;
  AlphaPlusBreakdown breakdown;
  std::size_t clamped_arguments = 0;  // omega arguments in (1-1e-12, 1) snapped to 1
};

// alpha+ = 4 omega(4) + int int int omega((1-b1-b2-b3)/b1) / (b1^2 b2 b3).
// Requires u_max >= 8 and tol <= 1e-4; throws NumericError if the error
// estimate (quadrature plus table error) cannot be brought under tol.
AlphaPlusResult alpha_plus(const BuchstabTable& table, double tol = 1e-4);

// Same integral with omega(u) replaced by the upper bound omega(3) for u >= 2
// (omega(3) is the maximum of omega on [2, inf)) and by 1/u on [1,2].
AlphaPlusResult alpha_plus_upper_bound(const BuchstabTable& table, double tol = 1e-4);

} // namespace threeprimes::buchstab
