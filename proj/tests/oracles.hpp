#pragma once

// Brute-force reference implementations used as independent oracles. These
// deliberately avoid the library's index machinery: everything is spelled out
// as loops over explicit multi-indices.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat naive_kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Partial trace over factor `which` of a chain of dims.
inline Mat naive_partial_trace(const Mat& m, const std::vector<int>& dims, int which) {
  int before = 1, after = 1;
  for (int i = 0; i < which; ++i) before *= dims[i];
  for (size_t i = which + 1; i < dims.size(); ++i) after *= dims[i];
  const int dt = dims[which];
  Mat out = Mat::Zero(before * after, before * after);
  for (int b1 = 0; b1 < before; ++b1)
    for (int a1 = 0; a1 < after; ++a1)
      for (int b2 = 0; b2 < before; ++b2)
        for (int a2 = 0; a2 < after; ++a2) {
          Cplx acc = 0.0;
          for (int s = 0; s < dt; ++s)
            acc += m((b1 * dt + s) * after + a1, (b2 * dt + s) * after + a2);
          out(b1 * after + a1, b2 * after + a2) = acc;
        }
  return out;
}

// Kraus application sum_k K rho K^dag.
inline Mat apply_kraus(const std::vector<Mat>& kraus, const Mat& rho) {
  Mat out = Mat::Zero(kraus[0].rows(), kraus[0].rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

// Qubit depolarizing channel Kraus set for noise parameter eta:
// rho -> (1-eta) rho + eta 1/2.
inline std::vector<Mat> depolarizing_kraus(double eta) {
  Mat id = Mat::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Cplx(0, -1), Cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  double p = 3.0 * eta / 4.0;
  std::vector<Mat> ks;
  ks.push_back(std::sqrt(1.0 - p) * id);
  for (const Mat& s : {x, y, z}) ks.push_back(std::sqrt(p / 3.0) * s);
  return ks;
}

inline Mat random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Cplx(g(rng), g(rng));
  return (m + Mat(m.adjoint())) / 2.0;
}

inline Mat random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Cplx(g(rng), g(rng));
  Mat rho = m * m.adjoint();
  return rho / rho.trace();
}

inline Eigen::VectorXcd random_pure(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v(i) = Cplx(g(rng), g(rng));
  v.normalize();
  return v;
}

// Haar-random unitary via QR with phase fix.
inline Mat random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

// Choi operator of a channel given by Kraus operators, input index first.
inline Mat choi_from_kraus(const std::vector<Mat>& kraus) {
  const int din = static_cast<int>(kraus[0].cols());
  const int dout = static_cast<int>(kraus[0].rows());
  Mat choi = Mat::Zero(din * dout, din * dout);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j) {
      Mat eij = Mat::Zero(din, din);
      eij(i, j) = 1.0;
      Mat out = apply_kraus(kraus, eij);
      for (int a = 0; a < dout; ++a)
        for (int b = 0; b < dout; ++b) choi(i * dout + a, j * dout + b) = out(a, b);
    }
  return choi;
}

}  // namespace oracle
