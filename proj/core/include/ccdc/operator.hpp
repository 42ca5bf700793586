#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "ccdc/layout.hpp"

namespace ccdc {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Default tolerance for operator equality and Hermiticity/PSD checks
/// (absolute, scaled by the largest magnitude involved).
inline constexpr double kOpTol = 1e-9;

/// Dense complex square matrix bound to a SystemLayout.
class LabeledOperator {
 public:
  LabeledOperator() = default;
  LabeledOperator(SystemLayout layout, Mat entries);

  static LabeledOperator identity(const SystemLayout& layout);
  static LabeledOperator zero(const SystemLayout& layout);

  const SystemLayout& layout() const { return layout_; }
  const Mat& entries() const { return m_; }
  Mat& entries() { return m_; }
  int dim() const { return layout_.total_dim(); }

  Cplx trace() const { return m_.trace(); }
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

  bool is_hermitian(double tol = kOpTol) const;
  /// Max-norm distance, layouts must match exactly.
  double distance(const LabeledOperator& other) const;
  bool approx_equal(const LabeledOperator& other, double tol = kOpTol) const;

  LabeledOperator relabeled(const std::vector<std::string>& new_labels) const;

  LabeledOperator operator+(const LabeledOperator& o) const;
  LabeledOperator operator-(const LabeledOperator& o) const;
  LabeledOperator operator*(Cplx s) const;
  friend LabeledOperator operator*(Cplx s, const LabeledOperator& x) { return x * s; }

 private:
  SystemLayout layout_;
  Mat m_;
};

struct PsdReport {
  bool psd = false;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Kronecker product of the operands in order; labels must be pairwise disjoint.
LabeledOperator tensor(const std::vector<LabeledOperator>& ops);
LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b,
                       const LabeledOperator& c);

/// Re-order tensor factors; `order` must be a permutation of the labels.
LabeledOperator permute_subsystems(const LabeledOperator& x, const std::vector<std::string>& order);

/// Trace out the given factors (result keeps the remaining factors in order).
LabeledOperator partial_trace(const LabeledOperator& x, const std::vector<std::string>& over);

/// Transpose the given factors in place.
LabeledOperator partial_transpose(const LabeledOperator& x, const std::vector<std::string>& on);

/// tr_X(.) (x) 1^X / d_X, with the replaced factors kept in place.
LabeledOperator trace_replace(const LabeledOperator& x, const std::vector<std::string>& on);

/// Link product: contraction over the shared labels, tensor on the rest.
/// Result lives on (labels(x) \ shared) + (labels(y) \ shared).
LabeledOperator link_product(const LabeledOperator& x, const LabeledOperator& y);

/// Apply a channel given by its Choi operator to rho (Choi input factors are
/// the ones sharing rho's labels). Equivalent to link_product(choi, rho).
LabeledOperator apply_channel(const LabeledOperator& choi, const LabeledOperator& rho);

/// Projector onto the span of bipartite ordered processes:
/// L(W) = W + TR_{AO,BI}(W) - TR_{BI}(W), TR = trace_replace.
LabeledOperator project_ordered(const LabeledOperator& w, const std::vector<std::string>& ao_labels,
                                const std::vector<std::string>& bi_labels);

/// PSD test with explicit tolerance: true iff lambda_min >= -tol*max(1, lambda_max).
/// Throws if the input is not Hermitian within tol.
PsdReport psd_check(const LabeledOperator& x, double tol = kOpTol);
PsdReport psd_check(const Mat& x, double tol = kOpTol);

/// Eigenvalues of a Hermitian operator, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Mat& x);

}  // namespace ccdc
