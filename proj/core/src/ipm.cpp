#include "ipm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ccdc::ipm {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// one decoded constraint coefficient: <A_r, X> = sum val * X(i,j)
struct Entry {
  int i, j;
  double val;
};

// decoded sparse row on one block, as plain matrix entries (off-diagonal svec
// coordinates are split into the two mirrored entries)
using EntryRow = std::vector<Entry>;

void decode_block_rows(const SpRow& a, int side, std::vector<int>& rows,
                       std::vector<EntryRow>& entries) {
  const int m = static_cast<int>(a.rows());
  rows.clear();
  entries.clear();
  // svec index -> (i, j)
  std::vector<std::pair<int, int>> lut(svec_dim(side));
  {
    int k = 0;
    for (int j = 0; j < side; ++j)
      for (int i = j; i < side; ++i) lut[k++] = {i, j};
  }
  for (int r = 0; r < m; ++r) {
    EntryRow row;
    for (SpRow::InnerIterator it(a, r); it; ++it) {
      auto [i, j] = lut[it.col()];
      if (i == j) {
        row.push_back({i, i, it.value()});
      } else {
        row.push_back({i, j, it.value() / kSqrt2});
        row.push_back({j, i, it.value() / kSqrt2});
      }
    }
    if (!row.empty()) {
      rows.push_back(r);
      entries.push_back(std::move(row));
    }
  }
}

double row_dot(const EntryRow& row, const MatrixXd& m) {
  double acc = 0.0;
  for (const Entry& e : row) acc += e.val * m(e.i, e.j);
  return acc;
}

void row_axpy(const EntryRow& row, double scale, MatrixXd& out) {
  for (const Entry& e : row) out(e.i, e.j) += scale * e.val;
}

// T += X * A_row * Zi via rank-one accumulation
void sandwich_row(const EntryRow& row, const MatrixXd& x, const MatrixXd& zi, MatrixXd& t) {
  t.setZero();
  for (const Entry& e : row) t.noalias() += e.val * x.col(e.i) * zi.row(e.j);
}

double max_step_psd(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& d, double cap) {
  MatrixXd s1 = chol.matrixL().solve(d);
  MatrixXd s2 = chol.matrixL().solve(s1.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es((s2 + s2.transpose()) / 2.0,
                                             Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-13) return cap;
  return std::min(cap, -1.0 / lmin);
}

double max_step_vec(const VectorXd& x, const VectorXd& d, double cap) {
  double a = cap;
  for (int i = 0; i < x.size(); ++i)
    if (d(i) < -1e-300) a = std::min(a, -x(i) / d(i));
  return a;
}

}  // namespace

VectorXd svec(const MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  VectorXd v(svec_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v(k++) = m(j, j);
    for (int i = j + 1; i < n; ++i) v(k++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
  return v;
}

MatrixXd smat(const VectorXd& v, int n) {
  MatrixXd m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    m(j, j) = v(k++);
    for (int i = j + 1; i < n; ++i) m(i, j) = m(j, i) = v(k++) / kSqrt2;
  }
  return m;
}

IpmResult solve(const CanonicalProblem& p, const IpmOptions& opts) {
  const int m = p.m();
  const int nb = static_cast<int>(p.blocks.size());
  const int nl = static_cast<int>(p.a_lin.cols());
  const int nf = static_cast<int>(p.a_free.cols());

  IpmResult res;
  res.x.resize(nb);
  res.z.resize(nb);

  double rank = nl;
  for (const auto& b : p.blocks) rank += b.side;
  if (rank < 1) rank = 1;

  double bnorm = m ? p.b.cwiseAbs().maxCoeff() : 0.0;
  double cnorm = 0.0;
  for (const auto& b : p.blocks)
    if (b.c.size()) cnorm = std::max(cnorm, b.c.cwiseAbs().maxCoeff());
  if (p.c_lin.size()) cnorm = std::max(cnorm, p.c_lin.cwiseAbs().maxCoeff());
  if (p.c_free.size()) cnorm = std::max(cnorm, p.c_free.cwiseAbs().maxCoeff());

  const double xi_p = std::max(10.0, bnorm);
  const double xi_d = std::max(10.0, cnorm);

  std::vector<MatrixXd> X(nb), Z(nb), Cb(nb);
  for (int i = 0; i < nb; ++i) {
    const int n = p.blocks[i].side;
    X[i] = xi_p * MatrixXd::Identity(n, n);
    Z[i] = xi_d * MatrixXd::Identity(n, n);
    Cb[i] = p.blocks[i].c.size() ? smat(p.blocks[i].c, n) : MatrixXd::Zero(n, n);
  }
  VectorXd xl = VectorXd::Constant(nl, xi_p), zl = VectorXd::Constant(nl, xi_d);
  VectorXd xf = VectorXd::Zero(nf);
  VectorXd y = VectorXd::Zero(m);

  // decoded rows per block
  std::vector<std::vector<int>> rows_of(nb);
  std::vector<std::vector<EntryRow>> ents_of(nb);
  for (int i = 0; i < nb; ++i) decode_block_rows(p.blocks[i].a, p.blocks[i].side, rows_of[i], ents_of[i]);

  Eigen::MatrixXd af_dense;  // m x nf
  if (nf) af_dense = MatrixXd(p.a_free);

  auto apply_a = [&]() {
    VectorXd out = VectorXd::Zero(m);
    for (int i = 0; i < nb; ++i)
      for (size_t k = 0; k < rows_of[i].size(); ++k)
        out(rows_of[i][k]) += row_dot(ents_of[i][k], X[i]);
    if (nl) out += p.a_lin * xl;
    if (nf) out.noalias() += af_dense * xf;
    return out;
  };
  auto at_y_block = [&](int i, const VectorXd& yy) {
    MatrixXd out = MatrixXd::Zero(p.blocks[i].side, p.blocks[i].side);
    for (size_t k = 0; k < rows_of[i].size(); ++k) row_axpy(ents_of[i][k], yy(rows_of[i][k]), out);
    return out;
  };

  double prev_mu = std::numeric_limits<double>::infinity();
  int stall = 0;

  std::vector<Eigen::LLT<MatrixXd>> xchol(nb), zchol(nb);
  std::vector<MatrixXd> Zi(nb), Rd(nb);

  res.status = IpmStatus::IterationLimit;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter + 1;

    VectorXd rp = p.b - apply_a();
    double gap_xz = xl.dot(zl);
    for (int i = 0; i < nb; ++i) {
      Rd[i] = Cb[i] - at_y_block(i, y) - Z[i];
      gap_xz += X[i].cwiseProduct(Z[i]).sum();
    }
    VectorXd rdl = nl ? VectorXd(p.c_lin - p.a_lin.transpose() * y - zl) : VectorXd();
    VectorXd rdf = nf ? VectorXd(p.c_free - af_dense.transpose() * y) : VectorXd();
    const double mu = gap_xz / rank;

    double pobj = nl ? p.c_lin.dot(xl) : 0.0;
    if (nf) pobj += p.c_free.dot(xf);
    for (int i = 0; i < nb; ++i) pobj += Cb[i].cwiseProduct(X[i]).sum();
    double dobj = m ? p.b.dot(y) : 0.0;

    res.pobj = pobj;
    res.dobj = dobj;
    res.pinf = m ? rp.cwiseAbs().maxCoeff() / (1.0 + bnorm) : 0.0;
    res.dinf = 0.0;
    for (int i = 0; i < nb; ++i)
      if (Rd[i].size())
        res.dinf = std::max(res.dinf, Rd[i].cwiseAbs().maxCoeff() / (1.0 + cnorm));
    if (nl && rdl.size()) res.dinf = std::max(res.dinf, rdl.cwiseAbs().maxCoeff() / (1.0 + cnorm));
    if (nf && rdf.size()) res.dinf = std::max(res.dinf, rdf.cwiseAbs().maxCoeff() / (1.0 + cnorm));
    res.rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double mu_rel = mu / (1.0 + std::abs(pobj));

    if (opts.verbose)
      std::printf("it %3d  pobj % .8e dobj % .8e gap %.2e pinf %.2e dinf %.2e mu %.2e\n", iter,
                  pobj, dobj, res.rel_gap, res.pinf, res.dinf, mu);

    if (res.pinf <= opts.tol_feas && res.dinf <= opts.tol_feas &&
        (res.rel_gap <= opts.tol_gap || mu_rel <= opts.tol_gap * 0.1)) {
      res.status = IpmStatus::Optimal;
      break;
    }

    // Farkas-style primal infeasibility test
    if (iter >= 5 && m) {
      double yn = y.cwiseAbs().maxCoeff();
      if (yn > 1.0) {
        VectorXd yh = y / yn;
        double by = p.b.dot(yh);
        if (by > 1e-6) {
          bool cert = true;
          for (int i = 0; i < nb && cert; ++i) {
            MatrixXd v = -at_y_block(i, yh);
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(v, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-7) cert = false;
          }
          if (cert && nl) {
            VectorXd v = -p.a_lin.transpose() * yh;
            if (v.minCoeff() < -1e-7) cert = false;
          }
          if (cert && nf) {
            if ((af_dense.transpose() * yh).cwiseAbs().maxCoeff() > 1e-7) cert = false;
          }
          if (cert) {
            res.status = IpmStatus::Infeasible;
            res.farkas_y = yh;
            break;
          }
        }
      }
    }

    // stagnation
    if (mu > prev_mu * (1.0 - 1e-10) && res.pinf > opts.tol_feas) {
      if (++stall > 15) {
        res.status = IpmStatus::NumericalFailure;
        break;
      }
    } else {
      stall = 0;
    }
    prev_mu = mu;

    // factorizations
    bool fact_ok = true;
    for (int i = 0; i < nb; ++i) {
      xchol[i].compute(X[i]);
      zchol[i].compute(Z[i]);
      if (xchol[i].info() != Eigen::Success || zchol[i].info() != Eigen::Success) {
        fact_ok = false;
        break;
      }
      Zi[i] = zchol[i].solve(MatrixXd::Identity(p.blocks[i].side, p.blocks[i].side));
      Zi[i] = (Zi[i] + Zi[i].transpose()).eval() / 2.0;
    }
    if (!fact_ok) {
      res.status = IpmStatus::NumericalFailure;
      break;
    }

    // Schur complement
    MatrixXd kkt = MatrixXd::Zero(m + nf, m + nf);
    {
      auto M = kkt.topLeftCorner(m, m);
      for (int i = 0; i < nb; ++i) {
        const int n = p.blocks[i].side;
        MatrixXd t(n, n);
        const auto& rows = rows_of[i];
        const auto& ents = ents_of[i];
        for (size_t s = 0; s < rows.size(); ++s) {
          sandwich_row(ents[s], X[i], Zi[i], t);
          for (size_t r = 0; r <= s; ++r) {
            double v = row_dot(ents[r], t);
            M(rows[r], rows[s]) += v;
            if (r != s) M(rows[s], rows[r]) += v;
          }
        }
      }
      if (nl) {
        // M += A_l diag(x/z) A_l^T, column by column
        VectorXd d = xl.cwiseQuotient(zl);
        Eigen::SparseMatrix<double> acm = p.a_lin;  // column-major copy
        for (int c = 0; c < nl; ++c)
          for (Eigen::SparseMatrix<double>::InnerIterator it(acm, c); it; ++it)
            for (Eigen::SparseMatrix<double>::InnerIterator jt(acm, c); jt; ++jt)
              M(it.row(), jt.row()) += d(c) * it.value() * jt.value();
      }
    }
    if (nf) {
      kkt.topRightCorner(m, nf) = af_dense;
      kkt.bottomLeftCorner(nf, m) = af_dense.transpose();
    }
    const double delta = 1e-10 * std::max(1.0, kkt.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < m; ++i) kkt(i, i) += delta;
    for (int i = 0; i < nf; ++i) kkt(m + i, m + i) -= delta;

    Eigen::LDLT<MatrixXd> kf(kkt);
    if (kf.info() != Eigen::Success) {
      res.status = IpmStatus::NumericalFailure;
      break;
    }

    std::vector<MatrixXd> dX(nb), dZ(nb), corrX(nb);
    VectorXd dy(m), dxl, dzl, dxf, corr_l;
    for (int i = 0; i < nb; ++i) corrX[i] = MatrixXd::Zero(p.blocks[i].side, p.blocks[i].side);
    corr_l = VectorXd::Zero(nl);

    auto direction = [&](double tau, bool with_corr) {
      // rhs g
      VectorXd g = rp;
      for (int i = 0; i < nb; ++i) {
        const int n = p.blocks[i].side;
        MatrixXd xrz(n, n);
        xrz.noalias() = X[i] * Rd[i] * Zi[i];
        MatrixXd inner = tau * Zi[i] - X[i] - (xrz + xrz.transpose()) / 2.0;
        if (with_corr) inner -= corrX[i];
        for (size_t k = 0; k < rows_of[i].size(); ++k)
          g(rows_of[i][k]) -= row_dot(ents_of[i][k], inner);
      }
      if (nl) {
        VectorXd v = (VectorXd::Constant(nl, tau) - (with_corr ? corr_l : VectorXd::Zero(nl)))
                         .cwiseQuotient(zl) -
                     xl - xl.cwiseProduct(rdl).cwiseQuotient(zl);
        g -= p.a_lin * v;
      }
      VectorXd rhs(m + nf);
      rhs.head(m) = g;
      if (nf) rhs.tail(nf) = rdf;
      VectorXd sol = kf.solve(rhs);
      // one refinement round
      VectorXd resid = rhs - kkt * sol;
      sol += kf.solve(resid);
      dy = sol.head(m);
      if (nf) dxf = sol.tail(nf);

      for (int i = 0; i < nb; ++i) {
        const int n = p.blocks[i].side;
        dZ[i] = Rd[i] - at_y_block(i, dy);
        MatrixXd xdz(n, n);
        xdz.noalias() = X[i] * dZ[i] * Zi[i];
        dX[i] = tau * Zi[i] - X[i] - (xdz + xdz.transpose()) / 2.0;
        if (with_corr) dX[i] -= corrX[i];
      }
      if (nl) {
        dzl = rdl - p.a_lin.transpose() * dy;
        dxl = (VectorXd::Constant(nl, tau) - (with_corr ? corr_l : VectorXd::Zero(nl)))
                  .cwiseQuotient(zl) -
              xl - xl.cwiseProduct(dzl).cwiseQuotient(zl);
      }
    };

    // predictor
    direction(0.0, false);
    double ap = 1.0, ad = 1.0;
    for (int i = 0; i < nb; ++i) {
      ap = std::min(ap, max_step_psd(xchol[i], dX[i], 1.0));
      ad = std::min(ad, max_step_psd(zchol[i], dZ[i], 1.0));
    }
    if (nl) {
      ap = std::min(ap, max_step_vec(xl, dxl, 1.0));
      ad = std::min(ad, max_step_vec(zl, dzl, 1.0));
    }
    double gap_aff = 0.0;
    for (int i = 0; i < nb; ++i)
      gap_aff += (X[i] + ap * dX[i]).cwiseProduct(Z[i] + ad * dZ[i]).sum();
    if (nl) gap_aff += (xl + ap * dxl).dot(zl + ad * dzl);
    double mu_aff = gap_aff / rank;
    double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);
    sigma = std::max(sigma, 1e-10);

    // corrector
    for (int i = 0; i < nb; ++i) {
      MatrixXd c = dX[i] * dZ[i] * Zi[i];
      corrX[i] = (c + c.transpose()) / 2.0;
    }
    if (nl) corr_l = dxl.cwiseProduct(dzl);
    direction(sigma * mu, true);

    ap = 1.0;
    ad = 1.0;
    for (int i = 0; i < nb; ++i) {
      ap = std::min(ap, max_step_psd(xchol[i], dX[i], 1.0));
      ad = std::min(ad, max_step_psd(zchol[i], dZ[i], 1.0));
    }
    if (nl) {
      ap = std::min(ap, max_step_vec(xl, dxl, 1.0));
      ad = std::min(ad, max_step_vec(zl, dzl, 1.0));
    }
    double gamma = std::min(0.99, 0.9 + 0.09 * std::min(ap, ad));
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (int i = 0; i < nb; ++i) {
      X[i] += ap * dX[i];
      X[i] = ((X[i] + X[i].transpose()) / 2.0).eval();
      Z[i] += ad * dZ[i];
      Z[i] = ((Z[i] + Z[i].transpose()) / 2.0).eval();
    }
    if (nl) {
      xl += ap * dxl;
      zl += ad * dzl;
    }
    if (nf) xf += ap * dxf;
    y += ad * dy;
  }

  res.x = X;
  res.z = Z;
  res.x_lin = xl;
  res.z_lin = zl;
  res.x_free = xf;
  res.y = y;
  return res;
}

}  // namespace ccdc::ipm
