#include "ccdc/operator.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ccdc {

LabeledOperator::LabeledOperator(SystemLayout layout, Mat entries)
    : layout_(std::move(layout)), m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() != layout_.total_dim())
    throw std::invalid_argument("LabeledOperator: matrix side must equal layout total dim");
}

LabeledOperator LabeledOperator::identity(const SystemLayout& layout) {
  return LabeledOperator(layout, Mat::Identity(layout.total_dim(), layout.total_dim()));
}

LabeledOperator LabeledOperator::zero(const SystemLayout& layout) {
  return LabeledOperator(layout, Mat::Zero(layout.total_dim(), layout.total_dim()));
}

bool LabeledOperator::is_hermitian(double tol) const {
  double scale = std::max(1.0, max_abs());
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double LabeledOperator::distance(const LabeledOperator& other) const {
  if (layout_ != other.layout_)
    throw std::invalid_argument("LabeledOperator::distance: layout mismatch");
  return (m_ - other.m_).cwiseAbs().maxCoeff();
}

bool LabeledOperator::approx_equal(const LabeledOperator& other, double tol) const {
  return distance(other) <= tol;
}

LabeledOperator LabeledOperator::relabeled(const std::vector<std::string>& new_labels) const {
  if (static_cast<int>(new_labels.size()) != layout_.size())
    throw std::invalid_argument("relabeled: wrong number of labels");
  std::vector<SystemLayout::Factor> fs;
  for (int i = 0; i < layout_.size(); ++i) fs.push_back({new_labels[i], layout_.factor(i).dim});
  return LabeledOperator(SystemLayout(std::move(fs)), m_);
}

LabeledOperator LabeledOperator::operator+(const LabeledOperator& o) const {
  if (layout_ != o.layout_) throw std::invalid_argument("operator+: layout mismatch");
  return LabeledOperator(layout_, m_ + o.m_);
}

LabeledOperator LabeledOperator::operator-(const LabeledOperator& o) const {
  if (layout_ != o.layout_) throw std::invalid_argument("operator-: layout mismatch");
  return LabeledOperator(layout_, m_ - o.m_);
}

LabeledOperator LabeledOperator::operator*(Cplx s) const { return LabeledOperator(layout_, s * m_); }

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b) {
  return tensor(std::vector<LabeledOperator>{a, b});
}

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b,
                       const LabeledOperator& c) {
  return tensor(std::vector<LabeledOperator>{a, b, c});
}

LabeledOperator tensor(const std::vector<LabeledOperator>& ops) {
  if (ops.empty()) throw std::invalid_argument("tensor: no operands");
  std::set<std::string> seen;
  for (const auto& op : ops)
    for (const auto& f : op.layout().factors())
      if (!seen.insert(f.label).second)
        throw std::invalid_argument("tensor: duplicate label across operands: " + f.label);

  LabeledOperator out = ops[0];
  for (size_t k = 1; k < ops.size(); ++k) {
    const Mat& a = out.entries();
    const Mat& b = ops[k].entries();
    const int da = static_cast<int>(a.rows()), db = static_cast<int>(b.rows());
    Mat m(da * db, da * db);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a(i, j) * b;
    out = LabeledOperator(out.layout().concat(ops[k].layout()), std::move(m));
  }
  return out;
}

namespace {

std::vector<int> positions_of(const SystemLayout& layout, const std::vector<std::string>& labels) {
  std::vector<int> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) pos.push_back(layout.position(l));
  return pos;
}

void check_subset_unique(const SystemLayout& layout, const std::vector<std::string>& labels,
                         const char* who) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!layout.has_label(l)) throw std::invalid_argument(std::string(who) + ": unknown label " + l);
    if (!seen.insert(l).second)
      throw std::invalid_argument(std::string(who) + ": repeated label " + l);
  }
}

}  // namespace

LabeledOperator permute_subsystems(const LabeledOperator& x, const std::vector<std::string>& order) {
  const SystemLayout& lay = x.layout();
  if (static_cast<int>(order.size()) != lay.size())
    throw std::invalid_argument("permute_subsystems: order is not a permutation of the labels");
  check_subset_unique(lay, order, "permute_subsystems");

  std::vector<int> src = positions_of(lay, order);  // new position -> old position
  std::vector<SystemLayout::Factor> fs;
  for (int p : src) fs.push_back(lay.factor(p));
  SystemLayout new_lay(std::move(fs));

  const int d = lay.total_dim();
  // old flat index for each new flat index
  std::vector<int> back(d);
  for (int r = 0; r < d; ++r) {
    std::vector<int> nm = new_lay.multi(r);
    int old_flat = 0;
    for (size_t i = 0; i < src.size(); ++i) old_flat += nm[i] * lay.stride(src[i]);
    back[r] = old_flat;
  }
  Mat m(d, d);
  const Mat& a = x.entries();
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = a(back[r], back[c]);
  return LabeledOperator(std::move(new_lay), std::move(m));
}

namespace {

// Split a layout into (kept, selected) with selected = `labels`; returns the
// flat-index contributions so that old_flat = kept_part[k] + sel_part[s].
struct Split {
  SystemLayout kept;
  SystemLayout sel;
  std::vector<int> kept_flat;  // size kept.total_dim()
  std::vector<int> sel_flat;   // size sel.total_dim()
};

Split split_layout(const SystemLayout& lay, const std::vector<std::string>& labels) {
  Split s;
  std::set<std::string> selset(labels.begin(), labels.end());
  std::vector<SystemLayout::Factor> kept_f, sel_f;
  std::vector<int> kept_pos, sel_pos;
  for (int i = 0; i < lay.size(); ++i) {
    if (selset.count(lay.factor(i).label)) {
      sel_f.push_back(lay.factor(i));
      sel_pos.push_back(i);
    } else {
      kept_f.push_back(lay.factor(i));
      kept_pos.push_back(i);
    }
  }
  // keep `sel` in the order given by `labels`, not layout order
  std::vector<SystemLayout::Factor> sel_ordered;
  std::vector<int> sel_pos_ordered;
  for (const auto& l : labels) {
    for (size_t j = 0; j < sel_f.size(); ++j)
      if (sel_f[j].label == l) {
        sel_ordered.push_back(sel_f[j]);
        sel_pos_ordered.push_back(sel_pos[j]);
      }
  }
  s.kept = SystemLayout(kept_f);
  s.sel = SystemLayout(sel_ordered);
  s.kept_flat.assign(s.kept.total_dim(), 0);
  s.sel_flat.assign(s.sel.total_dim(), 0);
  for (int k = 0; k < s.kept.total_dim(); ++k) {
    auto km = s.kept.multi(k);
    int f = 0;
    for (size_t i = 0; i < kept_pos.size(); ++i) f += km[i] * lay.stride(kept_pos[i]);
    s.kept_flat[k] = f;
  }
  for (int v = 0; v < s.sel.total_dim(); ++v) {
    auto vm = s.sel.multi(v);
    int f = 0;
    for (size_t i = 0; i < sel_pos_ordered.size(); ++i) f += vm[i] * lay.stride(sel_pos_ordered[i]);
    s.sel_flat[v] = f;
  }
  return s;
}

}  // namespace

LabeledOperator partial_trace(const LabeledOperator& x, const std::vector<std::string>& over) {
  check_subset_unique(x.layout(), over, "partial_trace");
  Split sp = split_layout(x.layout(), over);
  const int dk = sp.kept.total_dim(), ds = sp.sel.total_dim();
  Mat m = Mat::Zero(dk, dk);
  const Mat& a = x.entries();
  for (int r = 0; r < dk; ++r)
    for (int c = 0; c < dk; ++c) {
      Cplx acc = 0.0;
      for (int s = 0; s < ds; ++s)
        acc += a(sp.kept_flat[r] + sp.sel_flat[s], sp.kept_flat[c] + sp.sel_flat[s]);
      m(r, c) = acc;
    }
  return LabeledOperator(sp.kept, std::move(m));
}

LabeledOperator partial_transpose(const LabeledOperator& x, const std::vector<std::string>& on) {
  check_subset_unique(x.layout(), on, "partial_transpose");
  Split sp = split_layout(x.layout(), on);
  const int dk = sp.kept.total_dim(), ds = sp.sel.total_dim();
  const int d = x.dim();
  Mat m(d, d);
  const Mat& a = x.entries();
  for (int r = 0; r < dk; ++r)
    for (int c = 0; c < dk; ++c)
      for (int s = 0; s < ds; ++s)
        for (int t = 0; t < ds; ++t)
          m(sp.kept_flat[r] + sp.sel_flat[s], sp.kept_flat[c] + sp.sel_flat[t]) =
              a(sp.kept_flat[r] + sp.sel_flat[t], sp.kept_flat[c] + sp.sel_flat[s]);
  return LabeledOperator(x.layout(), std::move(m));
}

LabeledOperator trace_replace(const LabeledOperator& x, const std::vector<std::string>& on) {
  check_subset_unique(x.layout(), on, "trace_replace");
  Split sp = split_layout(x.layout(), on);
  const int dk = sp.kept.total_dim(), ds = sp.sel.total_dim();
  LabeledOperator tr = partial_trace(x, on);
  Mat m = Mat::Zero(x.dim(), x.dim());
  const double inv = 1.0 / static_cast<double>(ds);
  for (int r = 0; r < dk; ++r)
    for (int c = 0; c < dk; ++c) {
      const Cplx v = tr.entries()(r, c) * inv;
      for (int s = 0; s < ds; ++s)
        m(sp.kept_flat[r] + sp.sel_flat[s], sp.kept_flat[c] + sp.sel_flat[s]) = v;
    }
  return LabeledOperator(x.layout(), std::move(m));
}

LabeledOperator link_product(const LabeledOperator& x, const LabeledOperator& y) {
  // shared labels, in x's layout order
  std::vector<std::string> shared;
  for (const auto& f : x.layout().factors())
    if (y.layout().has_label(f.label)) {
      if (y.layout().dim_of(f.label) != f.dim)
        throw std::invalid_argument("link_product: shared label with mismatched dimension: " +
                                    f.label);
      shared.push_back(f.label);
    }

  Split sx = split_layout(x.layout(), shared);  // kept = A, sel = S
  Split sy = split_layout(y.layout(), shared);  // kept = C, sel = S (same order)
  const int da = sx.kept.total_dim(), dc = sy.kept.total_dim(), ds = sx.sel.total_dim();

  // R[(a,c),(a',c')] = sum_{s,t} X[(a,t),(a',s)] * Y[(t,c),(s,c')]
  SystemLayout out_lay = sx.kept.concat(sy.kept);
  Mat m = Mat::Zero(da * dc, da * dc);
  const Mat& X = x.entries();
  const Mat& Y = y.entries();
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2)
      for (int c = 0; c < dc; ++c)
        for (int c2 = 0; c2 < dc; ++c2) {
          Cplx acc = 0.0;
          for (int s = 0; s < ds; ++s) {
            const int xc = sx.kept_flat[a2] + sx.sel_flat[s];
            const int yr2 = sy.sel_flat[s] + sy.kept_flat[c2];
            for (int t = 0; t < ds; ++t)
              acc += X(sx.kept_flat[a] + sx.sel_flat[t], xc) *
                     Y(sy.sel_flat[t] + sy.kept_flat[c], yr2);
          }
          m(a * dc + c, a2 * dc + c2) = acc;
        }
  return LabeledOperator(std::move(out_lay), std::move(m));
}

LabeledOperator apply_channel(const LabeledOperator& choi, const LabeledOperator& rho) {
  for (const auto& f : rho.layout().factors())
    if (!choi.layout().has_label(f.label))
      throw std::invalid_argument("apply_channel: state label not in Choi layout: " + f.label);
  return link_product(choi, rho);
}

LabeledOperator project_ordered(const LabeledOperator& w, const std::vector<std::string>& ao_labels,
                                const std::vector<std::string>& bi_labels) {
  std::vector<std::string> aobi = ao_labels;
  aobi.insert(aobi.end(), bi_labels.begin(), bi_labels.end());
  return w + trace_replace(w, aobi) - trace_replace(w, bi_labels);
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

PsdReport psd_check(const Mat& x, double tol) {
  double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument("psd_check: input is not Hermitian within tolerance");
  Eigen::VectorXd ev = hermitian_eigenvalues((x + x.adjoint()) / 2.0);
  PsdReport rep;
  rep.lambda_min = ev.minCoeff();
  rep.lambda_max = ev.maxCoeff();
  rep.psd = rep.lambda_min >= -tol * std::max(1.0, rep.lambda_max);
  return rep;
}

PsdReport psd_check(const LabeledOperator& x, double tol) { return psd_check(x.entries(), tol); }

}  // namespace ccdc
