#include "core/mathieu.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace revival::mathieu {

double char_value_series(double nu, double q, double tolerance) {
  const double d = nu * nu - 1.0;
  if (std::abs(d) <= tolerance) {
    std::ostringstream msg;
    msg << "mathieu: series singular at nu=" << nu << " (|nu^2 - 1| <= " << tolerance << ")";
    fail(ErrorCode::kSingularOrder, msg.str());
  }
  return nu * nu + q * q / (2.0 * d);
}

namespace {

struct Eigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Eigensystem solve(double nu, double q, int truncation) {
  const int size = 2 * truncation + 1;
  Eigen::VectorXd diag(size);
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(size - 1, q);
  for (int i = 0; i < size; ++i) {
    const double c = nu + 2.0 * (i - truncation);
    diag(i) = c * c;
  }
  // The implicit QL iteration occasionally stalls on this exactly structured
  // matrix; a diagonal shift changes the iterates but not the eigenvectors.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (double shift : {0.0, std::abs(q), 0.5 * diag.maxCoeff(), 1.0 + 0.37 * std::abs(q)}) {
    es.computeFromTridiagonal(diag.array() - shift, sub, Eigen::ComputeEigenvectors);
    if (es.info() == Eigen::Success) return {es.eigenvalues().array() + shift, es.eigenvectors()};
  }
  fail(ErrorCode::kNumeric, "mathieu: tridiagonal eigensolver failed");
}

}  // namespace

double char_value_matrix_fixed(double nu, double q, int truncation, double max_q_step) {
  require(std::isfinite(nu) && std::isfinite(q), ErrorCode::kInvalidArgument, "mathieu: nu and q must be finite");
  require(truncation >= 10, ErrorCode::kInvalidArgument, "mathieu: truncation must be >= 10");
  require(max_q_step > 0.0, ErrorCode::kInvalidArgument, "mathieu: q step must be > 0");

  const int size = 2 * truncation + 1;
  // At q = 0 the matrix is diagonal and nu^2 sits in row m = 0.
  Eigen::VectorXd tracked = Eigen::VectorXd::Zero(size);
  tracked(truncation) = 1.0;
  double a = nu * nu;
  if (q == 0.0) return a;

  // Follow the eigenvector of maximal overlap with the previous step. Steps
  // are halved when the overlap is not dominant; a degenerate start never
  // becomes dominant and ends in a branch-ambiguity error.
  constexpr double kDominant = 0.9;
  constexpr double kMinStep = 1e-9;
  double q_now = 0.0;
  double step = std::min(max_q_step, std::abs(q));
  const double sign = q > 0.0 ? 1.0 : -1.0;
  while (q_now < std::abs(q)) {
    const double q_next = std::min(std::abs(q), q_now + step);
    const auto sys = solve(nu, sign * q_next, truncation);
    const Eigen::VectorXd overlaps = (sys.vectors.transpose() * tracked).cwiseAbs2();
    Eigen::Index best = 0;
    const double best_overlap = overlaps.maxCoeff(&best);
    if (best_overlap < kDominant) {
      step *= 0.5;
      if (step < kMinStep) {
        std::ostringstream msg;
        msg << "mathieu: ambiguous branch at nu=" << nu << ", q=" << sign * q_next;
        fail(ErrorCode::kBranchAmbiguity, msg.str());
      }
      continue;
    }
    tracked = sys.vectors.col(best);
    a = sys.values(best);
    q_now = q_next;
    step = std::min(max_q_step, 2.0 * step);
  }
  return a;
}

MathieuCharacteristic char_value_matrix(double nu, double q, int truncation, const MatrixOptions& options) {
  require(truncation >= 10, ErrorCode::kInvalidArgument, "mathieu: truncation must be >= 10");
  MathieuCharacteristic out;
  out.nu = nu;
  out.q = q;
  out.method = Method::kMatrix;
  out.near_singular_order = std::abs(std::abs(nu) - 1.0) < 1e-3;

  int m = truncation;
  double previous = char_value_matrix_fixed(nu, q, m, options.max_q_step);
  while (2 * m <= options.max_truncation) {
    const double current = char_value_matrix_fixed(nu, q, 2 * m, options.max_q_step);
    m *= 2;
    if (std::abs(current - previous) < options.convergence * std::max(1.0, std::abs(current))) {
      out.a = current;
      out.truncation = m;
      return out;
    }
    previous = current;
  }
  std::ostringstream msg;
  msg << "mathieu: no convergence up to truncation " << options.max_truncation << " (nu=" << nu << ", q=" << q << ")";
  fail(ErrorCode::kNumeric, msg.str());
}

}  // namespace revival::mathieu
