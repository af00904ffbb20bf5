#pragma once

// Characteristic values a_nu(q) of the Mathieu equation
//   y'' + (a - 2 q cos 2z) y = 0
// for real, generally fractional, Floquet order nu.

namespace revival::mathieu {

enum class Method { kSeries, kMatrix };

struct MathieuCharacteristic {
  double nu = 0.0;
  double q = 0.0;
  double a = 0.0;
  Method method = Method::kSeries;
  int truncation = 0;            // matrix half-width M (rows m = -M..M); 0 for series
  bool near_singular_order = false;  // |nu - 1| < 1e-3 or |nu + 1| < 1e-3
};

inline constexpr double kDefaultSingularTolerance = 1e-6;

/// a = nu^2 + q^2 / (2 (nu^2 - 1)), error O(q^4).
/// Throws kSingularOrder when |nu^2 - 1| <= tolerance.
double char_value_series(double nu, double q, double tolerance = kDefaultSingularTolerance);

struct MatrixOptions {
  int max_truncation = 512;
  double max_q_step = 0.5;
  double convergence = 1e-10;
};

/// Eigenvalue of the tridiagonal Floquet matrix (diagonal (nu + 2m)^2,
/// off-diagonal q) connected by continuation in q to nu^2 at q = 0. The
/// truncation is doubled from `truncation` until a changes by less than
/// options.convergence * max(1, |a|).
///
/// Throws kNumeric if max_truncation is reached first and kBranchAmbiguity if
/// the continuation cannot single out one eigenvector (degenerate start).
MathieuCharacteristic char_value_matrix(double nu, double q, int truncation = 20, const MatrixOptions& options = {});

/// Single continuation at a fixed truncation, no convergence loop.
double char_value_matrix_fixed(double nu, double q, int truncation, double max_q_step = 0.5);

}  // namespace revival::mathieu
