#pragma once

// Canonical-form primal-dual interior-point method (HKM direction, Mehrotra
// predictor-corrector) over a product of dense real symmetric PSD cones, a
// nonnegative orthant and free variables:
//
//   min  sum_b <C_b, X_b> + c_l.x_l + c_f.x_f
//   s.t. sum_b A_b svec(X_b) + A_l x_l + A_f x_f = b,
//        X_b psd, x_l >= 0, x_f free.
//
// svec uses the sqrt(2) off-diagonal convention, lower triangle column-major.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

namespace ccdc::ipm {

using SpRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline int svec_dim(int n) { return n * (n + 1) / 2; }

VectorXd svec(const MatrixXd& m);
MatrixXd smat(const VectorXd& v, int n);

struct CanonicalProblem {
  struct PsdBlock {
    int side = 0;
    SpRow a;      // m x svec_dim(side)
    VectorXd c;   // svec of the objective block (may be zero-size)
  };
  std::vector<PsdBlock> blocks;
  SpRow a_lin;   // m x L (nonnegative orthant), may be 0 columns
  VectorXd c_lin;
  SpRow a_free;  // m x F, may be 0 columns
  VectorXd c_free;
  VectorXd b;
  int m() const { return static_cast<int>(b.size()); }
};

enum class IpmStatus { Optimal, Infeasible, NumericalFailure, IterationLimit };

struct IpmOptions {
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  int max_iterations = 500;
  bool verbose = false;
};

struct IpmResult {
  IpmStatus status = IpmStatus::NumericalFailure;
  std::vector<MatrixXd> x;  // per block
  std::vector<MatrixXd> z;
  VectorXd x_lin, z_lin, x_free;
  VectorXd y;
  double pobj = 0.0, dobj = 0.0;
  double rel_gap = 0.0, pinf = 0.0, dinf = 0.0;
  int iterations = 0;
  VectorXd farkas_y;  // scaled certificate when status == Infeasible
};

IpmResult solve(const CanonicalProblem& p, const IpmOptions& opts);

}  // namespace ccdc::ipm
