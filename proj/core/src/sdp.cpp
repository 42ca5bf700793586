#include "ccdc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "ipm.hpp"

namespace ccdc {

Eigen::MatrixXd embed_hermitian(const Mat& h, double tol) {
  const int n = static_cast<int>(h.rows());
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument("embed_hermitian: input is not Hermitian within tolerance");
  Eigen::MatrixXd e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = h.real();
  e.bottomRightCorner(n, n) = h.real();
  e.bottomLeftCorner(n, n) = h.imag();
  e.topRightCorner(n, n) = -h.imag();
  return (e + e.transpose()) / 2.0;
}

// --- map builders -------------------------------------------------------------

namespace {

inline int vidx(int r, int c, int n) { return r * n + c; }

using Trip = Eigen::Triplet<Cplx>;

OpMap from_triplets(int rows, int cols, std::vector<Trip>& ts) {
  OpMap m(rows, cols);
  m.setFromTriplets(ts.begin(), ts.end());
  return m;
}

// selected/kept split identical to the operator.cpp one, local copy
struct Split {
  std::vector<int> kept_flat, sel_flat;
  int dk = 1, ds = 1;
};

Split split(const SystemLayout& lay, const std::vector<std::string>& labels) {
  std::vector<int> sel_pos;
  for (const auto& l : labels) sel_pos.push_back(lay.position(l));
  std::vector<int> kept_pos;
  for (int i = 0; i < lay.size(); ++i)
    if (std::find(sel_pos.begin(), sel_pos.end(), i) == sel_pos.end()) kept_pos.push_back(i);
  Split s;
  for (int i : sel_pos) s.ds *= lay.factor(i).dim;
  for (int i : kept_pos) s.dk *= lay.factor(i).dim;
  s.kept_flat.assign(s.dk, 0);
  s.sel_flat.assign(s.ds, 0);
  // enumerate multi-indices of each group
  auto fill = [&](const std::vector<int>& pos, std::vector<int>& out) {
    const int total = static_cast<int>(out.size());
    std::vector<int> dims;
    for (int p : pos) dims.push_back(lay.factor(p).dim);
    for (int f = 0; f < total; ++f) {
      int rem = f, acc = 0;
      for (int i = static_cast<int>(pos.size()) - 1; i >= 0; --i) {
        int comp = rem % dims[i];
        rem /= dims[i];
        acc += comp * lay.stride(pos[i]);
      }
      out[f] = acc;
    }
  };
  fill(sel_pos, s.sel_flat);
  fill(kept_pos, s.kept_flat);
  return s;
}

}  // namespace

OpMap map_identity(int side) {
  std::vector<Trip> ts;
  ts.reserve(side * side);
  for (int k = 0; k < side * side; ++k) ts.emplace_back(k, k, 1.0);
  return from_triplets(side * side, side * side, ts);
}

OpMap map_permute(const SystemLayout& from, const std::vector<std::string>& order) {
  const int d = from.total_dim();
  std::vector<int> src;
  for (const auto& l : order) src.push_back(from.position(l));
  std::vector<SystemLayout::Factor> fs;
  for (int p : src) fs.push_back(from.factor(p));
  SystemLayout to(fs);
  std::vector<int> back(d);
  for (int r = 0; r < d; ++r) {
    auto nm = to.multi(r);
    int f = 0;
    for (size_t i = 0; i < src.size(); ++i) f += nm[i] * from.stride(src[i]);
    back[r] = f;
  }
  std::vector<Trip> ts;
  ts.reserve(d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) ts.emplace_back(vidx(r, c, d), vidx(back[r], back[c], d), 1.0);
  return from_triplets(d * d, d * d, ts);
}

OpMap map_partial_trace(const SystemLayout& from, const std::vector<std::string>& over) {
  Split s = split(from, over);
  const int n = from.total_dim(), q = s.dk;
  std::vector<Trip> ts;
  ts.reserve(q * q * s.ds);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c)
      for (int v = 0; v < s.ds; ++v)
        ts.emplace_back(vidx(r, c, q),
                        vidx(s.kept_flat[r] + s.sel_flat[v], s.kept_flat[c] + s.sel_flat[v], n),
                        1.0);
  return from_triplets(q * q, n * n, ts);
}

OpMap map_partial_transpose(const SystemLayout& from, const std::vector<std::string>& on) {
  Split s = split(from, on);
  const int n = from.total_dim();
  std::vector<Trip> ts;
  ts.reserve(n * n);
  for (int r = 0; r < s.dk; ++r)
    for (int c = 0; c < s.dk; ++c)
      for (int v = 0; v < s.ds; ++v)
        for (int w = 0; w < s.ds; ++w)
          ts.emplace_back(vidx(s.kept_flat[r] + s.sel_flat[v], s.kept_flat[c] + s.sel_flat[w], n),
                          vidx(s.kept_flat[r] + s.sel_flat[w], s.kept_flat[c] + s.sel_flat[v], n),
                          1.0);
  return from_triplets(n * n, n * n, ts);
}

OpMap map_trace_replace(const SystemLayout& from, const std::vector<std::string>& on) {
  Split s = split(from, on);
  const int n = from.total_dim();
  const double inv = 1.0 / s.ds;
  std::vector<Trip> ts;
  for (int r = 0; r < s.dk; ++r)
    for (int c = 0; c < s.dk; ++c)
      for (int v = 0; v < s.ds; ++v)
        for (int w = 0; w < s.ds; ++w)
          ts.emplace_back(vidx(s.kept_flat[r] + s.sel_flat[v], s.kept_flat[c] + s.sel_flat[v], n),
                          vidx(s.kept_flat[r] + s.sel_flat[w], s.kept_flat[c] + s.sel_flat[w], n),
                          inv);
  return from_triplets(n * n, n * n, ts);
}

OpMap map_tensor_fixed(const SystemLayout& from, const LabeledOperator& fixed,
                       const std::vector<std::string>& target_order) {
  SystemLayout concat = from.concat(fixed.layout());
  const int nx = from.total_dim(), df = fixed.dim();
  const int p = concat.total_dim();
  // permutation back-map target -> concat
  std::vector<int> src;
  for (const auto& l : target_order) src.push_back(concat.position(l));
  std::vector<SystemLayout::Factor> fs;
  for (int q : src) fs.push_back(concat.factor(q));
  SystemLayout to(fs);
  std::vector<int> back(p);
  for (int r = 0; r < p; ++r) {
    auto nm = to.multi(r);
    int f = 0;
    for (size_t i = 0; i < src.size(); ++i) f += nm[i] * concat.stride(src[i]);
    back[r] = f;
  }
  std::vector<Trip> ts;
  for (int r = 0; r < p; ++r) {
    const int xr = back[r] / df, fr = back[r] % df;
    for (int c = 0; c < p; ++c) {
      const int xc = back[c] / df, fc = back[c] % df;
      Cplx v = fixed.entries()(fr, fc);
      if (std::abs(v) > 0.0) ts.emplace_back(vidx(r, c, p), vidx(xr, xc, nx), v);
    }
  }
  return from_triplets(p * p, nx * nx, ts);
}

OpMap map_trace_times(int from_side, const Mat& c) {
  const int p = static_cast<int>(c.rows());
  std::vector<Trip> ts;
  for (int r = 0; r < p; ++r)
    for (int cc = 0; cc < p; ++cc) {
      if (std::abs(c(r, cc)) == 0.0) continue;
      for (int i = 0; i < from_side; ++i)
        ts.emplace_back(vidx(r, cc, p), vidx(i, i, from_side), c(r, cc));
    }
  return from_triplets(p * p, from_side * from_side, ts);
}

OpMap map_sandwich(const Eigen::SparseMatrix<Cplx>& g) {
  const int q = static_cast<int>(g.rows());
  const int n = static_cast<int>(g.cols());
  // row lists of g
  std::vector<std::vector<std::pair<int, Cplx>>> rows(q);
  for (int k = 0; k < g.outerSize(); ++k)
    for (Eigen::SparseMatrix<Cplx>::InnerIterator it(g, k); it; ++it)
      rows[it.row()].push_back({static_cast<int>(it.col()), it.value()});
  std::vector<Trip> ts;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (const auto& [i, gi] : rows[a])
        for (const auto& [j, gj] : rows[b])
          ts.emplace_back(vidx(a, b, q), vidx(i, j, n), gi * std::conj(gj));
  return from_triplets(q * q, n * n, ts);
}

Mat apply_opmap(const OpMap& map, const Mat& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(std::lround(std::sqrt(double(map.rows()))));
  if (map.cols() != n * n) throw std::invalid_argument("apply_opmap: size mismatch");
  Vec vx(n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) vx(vidx(r, c, n)) = x(r, c);
  Vec vy = map * vx;
  Mat y(p, p);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) y(r, c) = vy(vidx(r, c, p));
  return y;
}

// --- expressions ----------------------------------------------------------------

OpExpr OpExpr::of_var(VarId v, int side) {
  OpExpr e;
  e.side = side;
  e.terms.push_back({v, map_identity(side)});
  return e;
}

OpExpr& OpExpr::add(VarId v, OpMap map, Cplx scale) {
  if (scale != Cplx(1.0)) map = OpMap(scale * map);
  if (side == 0) side = static_cast<int>(std::lround(std::sqrt(double(map.rows()))));
  terms.push_back({v, std::move(map)});
  return *this;
}

OpExpr& OpExpr::add_scalar(VarId v, Mat coeff) {
  if (side == 0) side = static_cast<int>(coeff.rows());
  scalar_terms.push_back({v, std::move(coeff)});
  return *this;
}

OpExpr& OpExpr::add_const(const Mat& c) {
  if (side == 0) side = static_cast<int>(c.rows());
  if (constant.size() == 0)
    constant = c;
  else
    constant += c;
  return *this;
}

ScalarExpr& ScalarExpr::add(VarId v, double c) {
  scalars.push_back({v, c});
  return *this;
}

ScalarExpr& ScalarExpr::add_trace(VarId v, Mat coeff) {
  traces.push_back({v, std::move(coeff)});
  return *this;
}

// --- problem impl ----------------------------------------------------------------

namespace {

struct VarRec {
  enum Kind { PsdHerm, FreeHerm, ScalarBounded, ScalarFree } kind;
  int side = 0;
  double lo = 0.0, hi = 0.0;
  std::string name;
  // compile-time assignments
  int block = -1;       // PSD block index
  int free_off = -1;    // offset into free vector
  int lin_off = -1;     // offset into nonneg vector (u part)
  int lin_hi_off = -1;  // slack v for finite hi
};

struct EqRowMeta {
  int row;
  int a, b;
  bool imag;
};

struct EqGroupMeta {
  int side = 0;
  std::vector<EqRowMeta> rows;
};

}  // namespace

struct ConicSolution::Detail {
  std::vector<VarRec> vars;
  std::vector<EqGroupMeta> groups;
  ipm::IpmResult ipm;
  double obj_const = 0.0;
};

struct ConicProblem::Impl {
  std::vector<VarRec> vars;
  struct StoredEq {
    OpExpr expr;
    int group;
  };
  std::vector<StoredEq> op_eqs;
  std::vector<std::pair<ScalarExpr, double>> scalar_eqs;
  ScalarExpr objective;
  int n_groups = 0;

  int side_of(VarId v) const { return vars.at(v.v).side; }
};

ConicProblem::ConicProblem() : impl_(std::make_shared<Impl>()) {}

VarId ConicProblem::add_hermitian_psd(int side, std::string name) {
  VarRec r;
  r.kind = VarRec::PsdHerm;
  r.side = side;
  r.name = std::move(name);
  impl_->vars.push_back(r);
  return {static_cast<int>(impl_->vars.size()) - 1};
}

VarId ConicProblem::add_hermitian_free(int side, std::string name) {
  VarRec r;
  r.kind = VarRec::FreeHerm;
  r.side = side;
  r.name = std::move(name);
  impl_->vars.push_back(r);
  return {static_cast<int>(impl_->vars.size()) - 1};
}

VarId ConicProblem::add_scalar(double lo, double hi, std::string name) {
  if (!(lo < hi)) throw std::invalid_argument("add_scalar: lo must be < hi");
  VarRec r;
  r.kind = VarRec::ScalarBounded;
  r.lo = lo;
  r.hi = hi;
  r.name = std::move(name);
  impl_->vars.push_back(r);
  return {static_cast<int>(impl_->vars.size()) - 1};
}

VarId ConicProblem::add_scalar_free(std::string name) {
  VarRec r;
  r.kind = VarRec::ScalarFree;
  r.name = std::move(name);
  impl_->vars.push_back(r);
  return {static_cast<int>(impl_->vars.size()) - 1};
}

int ConicProblem::side_of(VarId v) const { return impl_->side_of(v); }

EqId ConicProblem::add_eq_zero(const OpExpr& expr) {
  if (expr.side <= 0) throw std::invalid_argument("add_eq_zero: empty expression");
  Impl::StoredEq s{expr, impl_->n_groups++};
  impl_->op_eqs.push_back(std::move(s));
  return {impl_->op_eqs.back().group};
}

void ConicProblem::add_psd(const OpExpr& expr) {
  // bare PSD variable: nothing to add
  if (expr.terms.size() == 1 && expr.scalar_terms.empty() &&
      (expr.constant.size() == 0 || expr.constant.cwiseAbs().maxCoeff() == 0.0)) {
    const auto& t = expr.terms[0];
    if (impl_->vars.at(t.v.v).kind == VarRec::PsdHerm) {
      // identity map check (cheap structural test)
      bool ident = (t.map.rows() == t.map.cols()) &&
                   t.map.nonZeros() == t.map.rows();
      if (ident) {
        bool diag_ones = true;
        for (int r = 0; r < t.map.outerSize() && diag_ones; ++r)
          for (OpMap::InnerIterator it(t.map, r); it; ++it)
            if (it.row() != it.col() || std::abs(it.value() - Cplx(1.0)) > 1e-15)
              diag_ones = false;
        if (diag_ones) return;
      }
    }
  }
  VarId slack = add_hermitian_psd(expr.side, "psd_slack");
  OpExpr e = expr;
  e.add(slack, map_identity(expr.side), -1.0);
  add_eq_zero(e);
}

void ConicProblem::add_eq_scalar(const ScalarExpr& lhs, double rhs) {
  impl_->scalar_eqs.push_back({lhs, rhs});
}

void ConicProblem::minimize(const ScalarExpr& objective) { impl_->objective = objective; }

// --- compile + solve --------------------------------------------------------------

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// svec position of entry (r, c), r >= c, in a side-N symmetric matrix
inline int svec_pos(int r, int c, int n) { return c * n - c * (c - 1) / 2 + (r - c); }

using RealTrip = Eigen::Triplet<double>;

// Emit svec(emb(A)/2) coordinates of a Hermitian coefficient entry A_ij = v
// (i <= j), into the PSD block triplet list.
void emit_herm_entry(int i, int j, Cplx v, int n, int row, int col0,
                     std::vector<RealTrip>& out) {
  const int N = 2 * n;
  const double x = v.real(), y = v.imag();
  if (i == j) {
    if (x != 0.0) {
      out.emplace_back(row, col0 + svec_pos(i, i, N), x / 2.0);
      out.emplace_back(row, col0 + svec_pos(n + i, n + i, N), x / 2.0);
    }
  } else {
    if (x != 0.0) {
      out.emplace_back(row, col0 + svec_pos(j, i, N), kSqrt2 * x / 2.0);
      out.emplace_back(row, col0 + svec_pos(n + j, n + i, N), kSqrt2 * x / 2.0);
    }
    if (y != 0.0) {
      out.emplace_back(row, col0 + svec_pos(n + i, j, N), kSqrt2 * y / 2.0);
      out.emplace_back(row, col0 + svec_pos(n + j, i, N), -kSqrt2 * y / 2.0);
    }
  }
}

// coefficient dictionary on one variable: (i, j) -> complex coefficient of X_ij
using CoeffDict = std::map<std::pair<int, int>, Cplx>;

// Hermitian representer of X -> Re(sum c_ij X_ij) on Hermitian X:
// A_ii = Re c_ii, and for i < j: A_ji = [Re(c_ij + c_ji) + i Im(c_ij - c_ji)]/2.
// Emits entries (upper triangle A_ij = conj(A_ji)).
void herm_representer(const CoeffDict& c, int n,
                      const std::function<void(int, int, Cplx)>& sink) {
  (void)n;
  // accumulate c_ij and c_ji per unordered pair
  std::map<std::pair<int, int>, std::pair<Cplx, Cplx>> pairs;  // (i<j) -> (c_ij, c_ji)
  std::map<int, Cplx> diag;
  for (const auto& [ij, v] : c) {
    int i = ij.first, j = ij.second;
    if (i == j)
      diag[i] += v;
    else if (i < j)
      pairs[{i, j}].first += v;
    else
      pairs[{j, i}].second += v;
  }
  for (const auto& [i, v] : diag) sink(i, i, Cplx(v.real(), 0.0));
  for (const auto& [ij, cc] : pairs) {
    const auto& [cij, cji] = cc;
    // A_ji = [Re(c_ij + c_ji) + i Im(c_ij - c_ji)]/2, A_ij = conj
    Cplx aji(0.5 * (cij + cji).real(), 0.5 * (cij - cji).imag());
    sink(ij.first, ij.second, std::conj(aji));  // A_ij with i < j
  }
}

}  // namespace

ConicSolution solve(const ConicProblem& prob, const SolveOptions& opts) {
  const auto& impl = *prob.impl_;
  auto detail = std::make_shared<ConicSolution::Detail>();
  detail->vars = impl.vars;
  detail->groups.resize(impl.n_groups);

  // ---- assign variable storage
  ipm::CanonicalProblem cp;
  int n_lin = 0, n_free = 0;
  std::vector<int> block_col0;  // per PSD block, the svec column base (per-block A matrices)
  for (auto& v : detail->vars) {
    switch (v.kind) {
      case VarRec::PsdHerm: {
        v.block = static_cast<int>(cp.blocks.size());
        ipm::CanonicalProblem::PsdBlock b;
        b.side = 2 * v.side;
        cp.blocks.push_back(std::move(b));
        break;
      }
      case VarRec::FreeHerm:
        v.free_off = n_free;
        n_free += v.side * v.side;
        break;
      case VarRec::ScalarBounded:
        v.lin_off = n_lin++;
        if (std::isfinite(v.hi)) v.lin_hi_off = n_lin++;
        break;
      case VarRec::ScalarFree:
        v.free_off = n_free++;
        break;
    }
  }
  block_col0.assign(cp.blocks.size(), 0);

  // ---- row assembly
  struct RowBuf {
    std::vector<std::vector<RealTrip>> block_trips;  // per PSD block
    std::vector<RealTrip> lin_trips, free_trips;
    std::vector<double> b;
    int rows = 0;
  } rb;
  rb.block_trips.resize(cp.blocks.size());

  // free-Hermitian parameter offsets: [diag(n), re(i<j), im(i<j)]
  auto free_param = [&](const VarRec& v, int i, int j, bool imag_part) {
    const int n = v.side;
    if (i == j) return v.free_off + i;
    int a = std::min(i, j), b2 = std::max(i, j);
    int tri = a * n - a * (a + 1) / 2 + (b2 - a - 1);
    int t = n * (n - 1) / 2;
    return v.free_off + n + (imag_part ? t + tri : tri);
  };

  // emit one real row from per-variable coefficient dicts + constant; returns row index or -1
  auto emit_row = [&](const std::map<int, CoeffDict>& dicts,
                      const std::map<int, Cplx>& scalar_coeffs, Cplx constant, bool imag_row,
                      double rhs_extra) -> int {
    const int row = rb.rows;
    bool any = false;
    auto take = [&](Cplx z) { return imag_row ? z.imag() : z.real(); };
    for (const auto& [vi, dict] : dicts) {
      const VarRec& v = detail->vars[vi];
      // rotate coefficients for the imaginary row: Im f = Re(-i f)
      CoeffDict d = dict;
      if (imag_row)
        for (auto& [ij, c] : d) c *= Cplx(0, -1);
      if (v.kind == VarRec::PsdHerm) {
        herm_representer(d, v.side, [&](int i, int j, Cplx a) {
          if (std::abs(a) < 1e-15) return;
          any = true;
          emit_herm_entry(i, j, a, v.side, row, 0, rb.block_trips[v.block]);
        });
      } else if (v.kind == VarRec::FreeHerm) {
        // f = sum c_ij X_ij with X_ij = re + i im (i < j), X_ji = re - i im
        std::map<int, Cplx> dcoef;
        std::map<std::pair<int, int>, std::pair<Cplx, Cplx>> pcoef;
        for (const auto& [ij, c] : d) {
          if (ij.first == ij.second)
            dcoef[ij.first] += c;
          else if (ij.first < ij.second)
            pcoef[ij].first += c;
          else
            pcoef[{ij.second, ij.first}].second += c;
        }
        for (const auto& [i, c] : dcoef) {
          double cv = c.real();
          if (std::abs(cv) > 1e-15) {
            any = true;
            rb.free_trips.emplace_back(row, free_param(v, i, i, false), cv);
          }
          // imaginary diag coefficient on a Hermitian variable has no parameter
        }
        for (const auto& [ij, cc] : pcoef) {
          Cplx re_c = cc.first + cc.second;
          Cplx im_c = Cplx(0, 1) * (cc.first - cc.second);
          if (std::abs(re_c.real()) > 1e-15) {
            any = true;
            rb.free_trips.emplace_back(row, free_param(v, ij.first, ij.second, false),
                                       re_c.real());
          }
          if (std::abs(im_c.real()) > 1e-15) {
            any = true;
            rb.free_trips.emplace_back(row, free_param(v, ij.first, ij.second, true),
                                       im_c.real());
          }
        }
      }
    }
    double rhs = -take(constant) + rhs_extra;
    for (const auto& [vi, c] : scalar_coeffs) {
      const VarRec& v = detail->vars[vi];
      double cv = take(c);
      if (std::abs(cv) < 1e-15) continue;
      any = true;
      if (v.kind == VarRec::ScalarBounded) {
        rb.lin_trips.emplace_back(row, v.lin_off, cv);
        rhs -= cv * v.lo;  // s = lo + u
      } else {
        rb.free_trips.emplace_back(row, v.free_off, cv);
      }
    }
    if (!any) {
      if (std::abs(rhs) > 1e-10)
        throw std::logic_error("ConicProblem: constant-only equality row with nonzero rhs");
      return -1;
    }
    rb.b.push_back(rhs);
    ++rb.rows;
    return row;
  };

  // operator equalities
  for (const auto& eq : impl.op_eqs) {
    const OpExpr& e = eq.expr;
    const int p = e.side;
    EqGroupMeta& gm = detail->groups[eq.group];
    gm.side = p;
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) {
        std::map<int, CoeffDict> dicts;
        std::map<int, Cplx> scalars;
        Cplx cst = (e.constant.size() ? e.constant(a, b) : Cplx(0.0));
        const int out = vidx(a, b, p);
        for (const auto& t : e.terms) {
          CoeffDict& d = dicts[t.v.v];
          for (OpMap::InnerIterator it(t.map, out); it; ++it) {
            const int col = static_cast<int>(it.col());
            const VarRec& v = detail->vars[t.v.v];
            d[{col / v.side, col % v.side}] += it.value();
          }
          if (d.empty()) dicts.erase(t.v.v);
        }
        for (const auto& st : e.scalar_terms)
          if (std::abs(st.coeff(a, b)) > 0.0) scalars[st.v.v] += st.coeff(a, b);

        int r1 = emit_row(dicts, scalars, cst, false, 0.0);
        if (r1 >= 0) gm.rows.push_back({r1, a, b, false});
        if (a != b) {
          int r2 = emit_row(dicts, scalars, cst, true, 0.0);
          if (r2 >= 0) gm.rows.push_back({r2, a, b, true});
        }
      }
  }

  // scalar equalities
  for (const auto& [se, rhs] : impl.scalar_eqs) {
    std::map<int, CoeffDict> dicts;
    std::map<int, Cplx> scalars;
    for (const auto& t : se.scalars) scalars[t.v.v] += t.coeff;
    for (const auto& t : se.traces) {
      // tr(C X) = sum_ij C_ji X_ij
      CoeffDict& d = dicts[t.v.v];
      for (int i = 0; i < t.coeff.rows(); ++i)
        for (int j = 0; j < t.coeff.cols(); ++j)
          if (std::abs(t.coeff(j, i)) > 0.0) d[{i, j}] += t.coeff(j, i);
    }
    emit_row(dicts, scalars, Cplx(se.constant), false, rhs);
  }

  // bounded-scalar hi slacks: u + v = hi - lo
  for (const auto& v : detail->vars)
    if (v.kind == VarRec::ScalarBounded && v.lin_hi_off >= 0) {
      const int row = rb.rows;
      rb.lin_trips.emplace_back(row, v.lin_off, 1.0);
      rb.lin_trips.emplace_back(row, v.lin_hi_off, 1.0);
      rb.b.push_back(v.hi - v.lo);
      ++rb.rows;
    }

  // ---- objective
  double obj_const = impl.objective.constant;
  std::vector<Eigen::VectorXd> c_blocks(cp.blocks.size());
  for (size_t i = 0; i < cp.blocks.size(); ++i)
    c_blocks[i] = Eigen::VectorXd::Zero(ipm::svec_dim(cp.blocks[i].side));
  Eigen::VectorXd c_lin = Eigen::VectorXd::Zero(n_lin);
  Eigen::VectorXd c_free = Eigen::VectorXd::Zero(n_free);
  {
    for (const auto& t : impl.objective.scalars) {
      const VarRec& v = detail->vars[t.v.v];
      if (v.kind == VarRec::ScalarBounded) {
        c_lin(v.lin_off) += t.coeff;
        obj_const += t.coeff * v.lo;
      } else if (v.kind == VarRec::ScalarFree) {
        c_free(v.free_off) += t.coeff;
      } else {
        throw std::invalid_argument("minimize: scalar coefficient on a matrix variable");
      }
    }
    for (const auto& t : impl.objective.traces) {
      const VarRec& v = detail->vars[t.v.v];
      CoeffDict d;
      for (int i = 0; i < t.coeff.rows(); ++i)
        for (int j = 0; j < t.coeff.cols(); ++j)
          if (std::abs(t.coeff(j, i)) > 0.0) d[{i, j}] += t.coeff(j, i);
      if (v.kind == VarRec::PsdHerm) {
        std::vector<RealTrip> tmp;
        herm_representer(d, v.side, [&](int i, int j, Cplx a) {
          emit_herm_entry(i, j, a, v.side, 0, 0, tmp);
        });
        for (const auto& tr : tmp) c_blocks[v.block](tr.col()) += tr.value();
      } else if (v.kind == VarRec::FreeHerm) {
        for (const auto& [ij, c] : d) {
          if (ij.first == ij.second) {
            c_free(free_param(v, ij.first, ij.first, false)) += c.real();
          } else {
            // real objective on Hermitian variable: pair up
            if (ij.first < ij.second) {
              c_free(free_param(v, ij.first, ij.second, false)) += c.real();
              c_free(free_param(v, ij.first, ij.second, true)) += -c.imag();
            } else {
              c_free(free_param(v, ij.second, ij.first, false)) += c.real();
              c_free(free_param(v, ij.second, ij.first, true)) += c.imag();
            }
          }
        }
      } else {
        throw std::invalid_argument("minimize: trace term on a scalar variable");
      }
    }
  }

  // ---- pack canonical problem
  const int m = rb.rows;
  for (size_t i = 0; i < cp.blocks.size(); ++i) {
    ipm::SpRow a(m, ipm::svec_dim(cp.blocks[i].side));
    a.setFromTriplets(rb.block_trips[i].begin(), rb.block_trips[i].end());
    cp.blocks[i].a = std::move(a);
    cp.blocks[i].c = c_blocks[i];
  }
  cp.a_lin = ipm::SpRow(m, n_lin);
  cp.a_lin.setFromTriplets(rb.lin_trips.begin(), rb.lin_trips.end());
  cp.c_lin = c_lin;
  cp.a_free = ipm::SpRow(m, n_free);
  cp.a_free.setFromTriplets(rb.free_trips.begin(), rb.free_trips.end());
  cp.c_free = c_free;
  cp.b = Eigen::Map<Eigen::VectorXd>(rb.b.data(), m);

  ipm::IpmOptions io;
  io.tol_gap = opts.tol_gap;
  io.tol_feas = opts.tol_feas;
  io.max_iterations = opts.max_iterations;
  io.verbose = opts.verbose;
  detail->ipm = ipm::solve(cp, io);
  detail->obj_const = obj_const;

  ConicSolution sol;
  sol.detail = detail;
  switch (detail->ipm.status) {
    case ipm::IpmStatus::Optimal: sol.status = SolveStatus::Optimal; break;
    case ipm::IpmStatus::Infeasible: sol.status = SolveStatus::Infeasible; break;
    case ipm::IpmStatus::IterationLimit: sol.status = SolveStatus::IterationLimit; break;
    default: sol.status = SolveStatus::NumericalFailure; break;
  }
  sol.objective = detail->ipm.pobj + obj_const;
  sol.dual_objective = detail->ipm.dobj + obj_const;
  sol.residuals.primal = detail->ipm.pinf;
  sol.residuals.dual = detail->ipm.dinf;
  sol.residuals.gap = detail->ipm.rel_gap;
  sol.iterations = detail->ipm.iterations;
  if (sol.status == SolveStatus::Infeasible) sol.infeasibility_certificate = detail->ipm.farkas_y;
  return sol;
}

Mat ConicSolution::value(VarId vid) const {
  const VarRec& v = detail->vars.at(vid.v);
  if (v.kind == VarRec::PsdHerm) {
    const Eigen::MatrixXd& xe = detail->ipm.x.at(v.block);
    const int n = v.side;
    Mat out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(i, j) = Cplx((xe(i, j) + xe(n + i, n + j)) / 2.0,
                         (xe(n + i, j) - xe(i, n + j)) / 2.0);
    return (out + out.adjoint()).eval() / 2.0;
  }
  if (v.kind == VarRec::FreeHerm) {
    const int n = v.side;
    Mat out(n, n);
    const auto& xf = detail->ipm.x_free;
    int off = v.free_off;
    for (int i = 0; i < n; ++i) out(i, i) = xf(off + i);
    int t = n * (n - 1) / 2;
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++k) {
        out(i, j) = Cplx(xf(off + n + k), xf(off + n + t + k));
        out(j, i) = std::conj(out(i, j));
      }
    return out;
  }
  throw std::invalid_argument("ConicSolution::value: not a matrix variable");
}

double ConicSolution::scalar_value(VarId vid) const {
  const VarRec& v = detail->vars.at(vid.v);
  if (v.kind == VarRec::ScalarBounded) return v.lo + detail->ipm.x_lin(v.lin_off);
  if (v.kind == VarRec::ScalarFree) return detail->ipm.x_free(v.free_off);
  throw std::invalid_argument("ConicSolution::scalar_value: not a scalar variable");
}

Mat ConicSolution::dual(EqId e) const {
  const EqGroupMeta& g = detail->groups.at(e.group);
  Mat s = Mat::Zero(g.side, g.side);
  for (const auto& rm : g.rows) {
    const double y = detail->ipm.y(rm.row);
    if (rm.a == rm.b) {
      s(rm.a, rm.a) += y;  // only real rows on the diagonal
    } else if (!rm.imag) {
      s(rm.a, rm.b) += y / 2.0;
      s(rm.b, rm.a) += y / 2.0;
    } else {
      s(rm.a, rm.b) += Cplx(0, 0.5) * y;
      s(rm.b, rm.a) += Cplx(0, -0.5) * y;
    }
  }
  return s;
}

}  // namespace ccdc
