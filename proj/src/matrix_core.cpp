#include "cmrac/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "cmrac/error.hpp"

namespace cmrac {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHurwitz: return "NotHurwitz";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::MatchingViolated: return "MatchingViolated";
    case ErrorKind::InfeasibleConstraint: return "InfeasibleConstraint";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BarrierViolated: return "BarrierViolated";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::StabilityConditionViolated: return "StabilityConditionViolated";
    case ErrorKind::IdentityViolated: return "IdentityViolated";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

void require_square(const Matrix& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << A.rows() << "x" << A.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

double asymmetry(const Matrix& S) { return (S - S.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

EigenExtrema eig_extrema_sym(const Matrix& S) {
  require_square(S, "symmetric matrix");
  if (asymmetry(S) > kSymmetryTolerance) {
    throw Error(ErrorKind::NotSymmetric, "asymmetry exceeds 1e-10");
  }
  const Eigen::Index n = S.rows();
  Matrix a = 0.5 * (S + S.transpose());

  // Cyclic Jacobi sweeps; quadratic convergence once off-diagonal mass is small.
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-30 * std::max(1.0, a.squaredNorm())) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  const Vector diag = a.diagonal();
  return {diag.minCoeff(), diag.maxCoeff()};
}

bool is_hurwitz(const Matrix& A) {
  require_square(A, "A");
  if (!A.allFinite()) return false;
  const Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) return false;
  return (solver.eigenvalues().real().array() < -kHurwitzMargin).all();
}

bool is_controllable(const Matrix& A, const Vector& b) {
  require_square(A, "A");
  if (b.size() != A.rows()) throw Error(ErrorKind::DimensionMismatch, "B length differs from A");
  const Eigen::Index n = A.rows();
  Matrix ctrb(n, n);
  Vector col = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.col(k) = col;
    col = A * col;
  }
  const Eigen::JacobiSVD<Matrix> svd(ctrb);
  const Vector& sv = svd.singularValues();
  if (sv(0) == 0.0) return false;
  return sv(n - 1) > kRankThreshold * sv(0);
}

LyapunovPair solve_lyapunov(const Matrix& Am, const Matrix& Q) {
  require_square(Am, "A_m");
  require_square(Q, "Q");
  if (Q.rows() != Am.rows()) throw Error(ErrorKind::DimensionMismatch, "Q and A_m differ in size");
  if (!is_hurwitz(Am)) throw Error(ErrorKind::NotHurwitz, "A_m has an eigenvalue with real part >= -1e-9");
  if (eig_extrema_sym(Q).min <= 0.0) throw Error(ErrorKind::NotPositiveDefinite, "Q must be positive definite");

  const Eigen::Index n = Am.rows();
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix At = Am.transpose();

  // Column-major vec: vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P).
  Matrix kron(n * n, n * n);
  kron.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) += eye(i, j) * At + At(i, j) * eye;
    }
  }
  const Vector rhs = -Eigen::Map<const Vector>(Matrix(Q).data(), n * n);

  const Eigen::FullPivLU<Matrix> lu(kron);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "Kronecker Lyapunov system is singular");
  const Vector vecP = lu.solve(rhs);

  Matrix P = Eigen::Map<const Matrix>(vecP.data(), n, n);
  P = (0.5 * (P + P.transpose())).eval();

  LyapunovPair pair{P, Q, (At * P + P * Am + Q).norm()};
  if (!std::isfinite(pair.residual_norm) || pair.residual_norm > 1e-9 * (1.0 + Q.norm())) {
    throw Error(ErrorKind::SingularSystem, "Lyapunov residual above tolerance; system numerically singular");
  }
  if (eig_extrema_sym(P).min <= 0.0) {
    throw Error(ErrorKind::SingularSystem, "Lyapunov solution is not positive definite");
  }
  return pair;
}

MatchingGains derive_matching_gains(const Matrix& A, const Matrix& Am, const Vector& B, double lambda,
                                    const Vector& Bm) {
  require_square(A, "A");
  if (Am.rows() != A.rows() || Am.cols() != A.cols() || B.size() != A.rows() || Bm.size() != A.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "plant and target dimensions differ");
  }
  const Vector b = B * lambda;
  const double bb = b.squaredNorm();
  if (bb == 0.0) throw Error(ErrorKind::MatchingViolated, "B*lambda is zero");

  const Matrix D = Am - A;
  MatchingGains gains{D.transpose() * b / bb, b.dot(Bm) / bb};

  const double residual_A = (D - b * gains.K.transpose()).cwiseAbs().maxCoeff();
  const double residual_B = (Bm - b * gains.l).cwiseAbs().maxCoeff();
  if (residual_A > kMatchingTolerance || residual_B > kMatchingTolerance) {
    std::ostringstream os;
    os << "no exact matching gains: residual(A_m - A) = " << residual_A << ", residual(B_m) = " << residual_B;
    throw Error(ErrorKind::MatchingViolated, os.str());
  }
  return gains;
}

Vector derive_nonlinear_gain(const Matrix& A1, const Vector& B, double lambda) {
  require_square(A1, "A1");
  if (B.size() != A1.rows()) throw Error(ErrorKind::DimensionMismatch, "B length differs from A1");
  const Vector b = B * lambda;
  const double bb = b.squaredNorm();
  if (bb == 0.0) throw Error(ErrorKind::MatchingViolated, "B*lambda is zero");
  const Vector K1 = -A1.transpose() * b / bb;
  const double residual = (A1 + b * K1.transpose()).cwiseAbs().maxCoeff();
  if (residual > kMatchingTolerance) {
    std::ostringstream os;
    os << "A1 is not of the form -B*lambda*K1^T: residual = " << residual;
    throw Error(ErrorKind::MatchingViolated, os.str());
  }
  return K1;
}

}  // namespace cmrac
