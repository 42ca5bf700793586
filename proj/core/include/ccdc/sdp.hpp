#pragma once

#include <Eigen/Sparse>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccdc/operator.hpp"

namespace ccdc {

/// [[Re H, -Im H], [Im H, Re H]]; PSD iff H is, eigenvalues doubled in
/// multiplicity. Throws on non-Hermitian input.
Eigen::MatrixXd embed_hermitian(const Mat& h, double tol = kOpTol);

/// Complex linear map acting on vec'd operators (row-major vec: idx = r*n + c).
/// Row-major storage so output entries can be scanned directly.
using OpMap = Eigen::SparseMatrix<Cplx, Eigen::RowMajor>;

// map builders -----------------------------------------------------------------

OpMap map_identity(int side);
/// X on `from` -> permuted copy on the layout ordered as `order`.
OpMap map_permute(const SystemLayout& from, const std::vector<std::string>& order);
OpMap map_partial_trace(const SystemLayout& from, const std::vector<std::string>& over);
OpMap map_partial_transpose(const SystemLayout& from, const std::vector<std::string>& on);
OpMap map_trace_replace(const SystemLayout& from, const std::vector<std::string>& on);
/// X -> perm(X (x) fixed) on the target label order.
OpMap map_tensor_fixed(const SystemLayout& from, const LabeledOperator& fixed,
                       const std::vector<std::string>& target_order);
/// X -> tr(X) * C.
OpMap map_trace_times(int from_side, const Mat& c);
/// X -> G X G^dag (G rectangular, rows = target side).
OpMap map_sandwich(const Eigen::SparseMatrix<Cplx>& g);
/// Apply a labeled-operator map numerically (for testing map builders).
Mat apply_opmap(const OpMap& map, const Mat& x);

// problem ----------------------------------------------------------------------

struct VarId {
  int v = -1;
  bool valid() const { return v >= 0; }
};

struct EqId {
  int group = -1;
};

/// Affine operator-valued expression on a side-p space.
struct OpExpr {
  int side = 0;
  struct Term {
    VarId v;
    OpMap map;
  };
  struct ScalarTerm {
    VarId v;
    Mat coeff;
  };
  std::vector<Term> terms;
  std::vector<ScalarTerm> scalar_terms;
  Mat constant;  // side x side, zero if empty

  static OpExpr of_var(VarId v, int side);
  OpExpr& add(VarId v, OpMap map, Cplx scale = 1.0);
  OpExpr& add_scalar(VarId v, Mat coeff);
  OpExpr& add_const(const Mat& c);
};

/// Scalar affine expression: sum_k a_k s_k + sum_j tr(C_j^T-style pairing X_j) + const.
struct ScalarExpr {
  struct STerm {
    VarId v;
    double coeff;
  };
  struct TrTerm {
    VarId v;
    Mat coeff;  // contributes tr(coeff * X)
  };
  std::vector<STerm> scalars;
  std::vector<TrTerm> traces;
  double constant = 0.0;

  ScalarExpr& add(VarId v, double c);
  ScalarExpr& add_trace(VarId v, Mat coeff);
};

enum class SolveStatus { Optimal, Infeasible, NumericalFailure, IterationLimit };

struct SolveOptions {
  double tol_gap = 1e-9;    // relative duality gap
  double tol_feas = 1e-9;   // relative primal/dual feasibility
  int max_iterations = 500;
  bool verbose = false;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  double dual_objective = 0.0;
  struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;  // relative duality gap
  } residuals;
  int iterations = 0;

  Mat value(VarId v) const;
  double scalar_value(VarId v) const;
  /// Hermitian dual multiplier of an operator equality group.
  Mat dual(EqId e) const;
  /// Farkas-style certificate rows when status == Infeasible (may be empty).
  Eigen::VectorXd infeasibility_certificate;

  // internals filled by solve()
  struct Detail;
  std::shared_ptr<const Detail> detail;
};

/// Small dense conic problems: Hermitian PSD matrix variables, free Hermitian
/// variables, bounded scalars, operator equalities, PSD memberships. Complex
/// data is compiled onto real symmetric cones via embed_hermitian.
class ConicProblem {
 public:
  ConicProblem();

  VarId add_hermitian_psd(int side, std::string name = "");
  VarId add_hermitian_free(int side, std::string name = "");
  /// Scalar with lo <= s <= hi (hi may be +inf).
  VarId add_scalar(double lo, double hi, std::string name = "");
  VarId add_scalar_free(std::string name = "");

  /// expr == 0 entrywise. Returns a handle for dual extraction.
  EqId add_eq_zero(const OpExpr& expr);
  /// expr >= 0 (PSD); a slack variable is introduced unless expr is a bare PSD variable.
  void add_psd(const OpExpr& expr);
  void add_eq_scalar(const ScalarExpr& lhs, double rhs);

  void minimize(const ScalarExpr& objective);

  int side_of(VarId v) const;

  friend ConicSolution solve(const ConicProblem&, const SolveOptions&);

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

ConicSolution solve(const ConicProblem& p, const SolveOptions& opts = {});

}  // namespace ccdc
