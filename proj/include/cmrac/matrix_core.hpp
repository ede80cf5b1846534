#pragma once

#include <Eigen/Dense>

namespace cmrac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical tolerances of the dense kernel.
inline constexpr double kHurwitzMargin = 1e-9;
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kMatchingTolerance = 1e-8;
inline constexpr double kRankThreshold = 1e-10;

/// Solution of A_m^T P + P A_m = -Q.
struct LyapunovPair {
  Matrix P;
  Matrix Q;
  double residual_norm = 0.0;  // ||A_m^T P + P A_m + Q||_F
};

struct EigenExtrema {
  double min = 0.0;
  double max = 0.0;
};

struct MatchingGains {
  Vector K;
  double l = 0.0;
};

/**
 * Solves the continuous algebraic Lyapunov equation A_m^T P + P A_m = -Q by
 * assembling the n^2 x n^2 Kronecker system and solving it directly.
 *
 * Throws NotHurwitz if A_m has an eigenvalue with real part >= -kHurwitzMargin,
 * NotSymmetric if Q is not symmetric, NotPositiveDefinite if Q is not
 * positive definite and SingularSystem if the vectorized system is singular.
 * The residual is guaranteed to be at most 1e-9 * (1 + ||Q||_F).
 */
[[nodiscard]] LyapunovPair solve_lyapunov(const Matrix& Am, const Matrix& Q);

/// Smallest and largest eigenvalue of a symmetric matrix (cyclic Jacobi).
[[nodiscard]] EigenExtrema eig_extrema_sym(const Matrix& S);

/// True iff every eigenvalue of A has real part < -kHurwitzMargin.
[[nodiscard]] bool is_hurwitz(const Matrix& A);

/// Rank test on [b, A b, ..., A^{n-1} b] with relative singular-value threshold.
[[nodiscard]] bool is_controllable(const Matrix& A, const Vector& b);

/**
 * Least-squares K, l with A_m - A = (B lambda) K^T and B_m = (B lambda) l.
 * Only fixtures and diagnostics use this; the controller never sees K or l.
 * Throws MatchingViolated (with both residuals in the message) if either
 * elementwise residual exceeds kMatchingTolerance.
 */
[[nodiscard]] MatchingGains derive_matching_gains(const Matrix& A, const Matrix& Am, const Vector& B,
                                                  double lambda, const Vector& Bm);

/// Gain K1 with A1 = -(B lambda) K1^T; throws MatchingViolated otherwise.
[[nodiscard]] Vector derive_nonlinear_gain(const Matrix& A1, const Vector& B, double lambda);

}  // namespace cmrac
