#pragma once

#include <span>
#include <string>
#include <vector>

#include "displab/errors.hpp"

namespace displab {

/// Tabulated smooth solution U(X; T) of the fourth-order ODE
///   X = T U - [U^3/6 + U_X^2/24 + U U_XX/12 + U_XXXX/240]
/// on [-X_max, X_max] with the algebraic tail behavior at both ends.
struct PI2Solution {
  double T = 0.0;
  std::vector<double> X;
  std::vector<double> U;
  double X_max = 0.0;
  int n_nodes = 0;
  double residual_norm = 0.0;  // interior sup-norm after the solve
  int newton_iterations = 0;
};

/// Residual X - T U + U^3/6 + U_X^2/24 + U U_XX/12 + U_XXXX/240 at the
/// nodes, with the derivatives supplied by the caller.
std::vector<double> pi2_residual(std::span<const double> X,
                                 std::span<const double> U,
                                 std::span<const double> Ux,
                                 std::span<const double> Uxx,
                                 std::span<const double> Uxxxx, double T);

/// Same, with derivatives from the solver's own finite-difference stencils
/// on a uniform grid.
std::vector<double> pi2_residual_fd(std::span<const double> X,
                                    std::span<const double> U, double T);

/// Smooth decreasing branch of the leading cubic X = T U - U^3/6.  For
/// T > 0 the fold window is bridged by a monotone Hermite cubic joining the
/// two outer branches.
double cubic_leading(double X, double T);

/// Two-term tail expansion U ~ -(6X)^{1/3} - 2^{2/3} T / (3X)^{1/3}.
double pi2_asymptotic(double X, double T);
/// d/dX of the same expansion.
double pi2_asymptotic_dx(double X, double T);

struct PI2SolveOptions {
  double X_max = 400.0;
  /// Odd count puts a node at X = 0; 16385 keeps the doubling test under
  /// 1e-7 with the uniform 13-point stencils.
  int n_nodes = 16385;
  double tol = 1e-10;
  int max_newton = 60;
  double continuation_step = 0.2;
};

/// Damped-Newton collocation solve of the boundary value problem, with
/// boundary values and slopes taken from the two-term tail expansion,
/// nested iteration over grid levels (the leading-order guess has a
/// cube-root kink that only coarse grids tolerate), and continuation in T
/// from 0.5 when |T| > 0.5.
PI2Solution pi2_solve(double T, const PI2SolveOptions& opt = {});

/// Table of solutions with a local-cubic interpolator in (X, T); outside
/// the stored X-range the tail expansion takes over.
class PI2Interpolator {
 public:
  PI2Interpolator() = default;
  explicit PI2Interpolator(std::vector<PI2Solution> solutions);

  double eval(double X, double T) const;
  double x_max() const { return x_max_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  const std::vector<PI2Solution>& solutions() const { return sols_; }

 private:
  std::vector<PI2Solution> sols_;  // sorted by T
  double x_max_ = 0.0, t_min_ = 0.0, t_max_ = 0.0;
};

struct PI2TabulateReport {
  PI2Interpolator interpolator;
  /// Sup-error of the interpolator against a direct solve at a held-out T
  /// midway through the grid (only when validate = true and >= 2 T's).
  double holdout_error = 0.0;
  bool validated = false;
};

PI2TabulateReport pi2_tabulate(std::span<const double> T_values,
                               const PI2SolveOptions& opt = {},
                               bool validate = false);

}  // namespace displab
