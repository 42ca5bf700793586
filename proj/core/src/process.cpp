#include "ccdc/process.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ccdc {

std::string role_name(Role r) {
  switch (r) {
    case Role::AI: return "A_I";
    case Role::AO: return "A_O";
    case Role::BI: return "B_I";
    case Role::BO: return "B_O";
    case Role::CI: return "C_I";
  }
  return "?";
}

Role role_from_name(const std::string& s) {
  if (s == "A_I") return Role::AI;
  if (s == "A_O") return Role::AO;
  if (s == "B_I") return Role::BI;
  if (s == "B_O") return Role::BO;
  if (s == "C_I") return Role::CI;
  throw std::invalid_argument("unknown role: " + s);
}

const std::vector<std::string>& ProcessMatrix::labels(Role r) const {
  auto it = roles.find(r);
  if (it == roles.end() || it->second.empty())
    throw std::invalid_argument("ProcessMatrix: missing role " + role_name(r));
  return it->second;
}

RoleMap bipartite_roles() { return bipartite_roles({"A_I"}, {"A_O"}, {"B_I"}); }

RoleMap bipartite_roles(const std::vector<std::string>& ai, const std::vector<std::string>& ao,
                        const std::vector<std::string>& bi) {
  return {{Role::AI, ai}, {Role::AO, ao}, {Role::BI, bi}};
}

std::string ValidationReport::to_string() const {
  std::ostringstream ss;
  auto line = [&](const char* name, const ConditionCheck& c) {
    ss << "  " << name << ": " << (c.ok ? "pass" : "FAIL") << " (residual " << c.residual << ")\n";
  };
  ss << (pass ? "valid ordered process\n" : "INVALID ordered process\n");
  line("psd", psd);
  line("projector", projector);
  line("trace", trace);
  line("marginal", marginal);
  return ss.str();
}

LabeledOperator project_ordered(const ProcessMatrix& w) {
  return project_ordered(w.op, w.labels(Role::AO), w.labels(Role::BI));
}

ValidationReport validate_ordered(const ProcessMatrix& w, double tol) {
  ValidationReport rep;
  const double d_ao = w.dim(Role::AO);
  PsdReport psd = psd_check(w.op, tol);
  rep.psd.residual = std::max(0.0, -psd.lambda_min);
  rep.psd.ok = psd.psd;

  rep.projector.residual = w.op.distance(project_ordered(w));
  rep.projector.ok = rep.projector.residual <= tol;

  rep.trace.residual = std::abs(w.op.trace() - Cplx(d_ao));
  rep.trace.ok = rep.trace.residual <= tol * d_ao;

  // tr_BI(W) = sigma (x) 1_AO  <=>  tr_BI(W) is invariant under TR_{AO}
  LabeledOperator marg = partial_trace(w.op, w.labels(Role::BI));
  rep.marginal.residual = marg.distance(trace_replace(marg, w.labels(Role::AO)));
  rep.marginal.ok = rep.marginal.residual <= tol;

  rep.pass = rep.psd.ok && rep.projector.ok && rep.trace.ok && rep.marginal.ok;
  return rep;
}

ValidationReport validate_tripartite_ordered(const ProcessMatrix& w, double tol) {
  ValidationReport rep;
  const double d_ao = w.dim(Role::AO);
  const double d_bo = w.dim(Role::BO);

  PsdReport psd = psd_check(w.op, tol);
  rep.psd.residual = std::max(0.0, -psd.lambda_min);
  rep.psd.ok = psd.psd;

  // comb marginals: tr_CI(W) = W2 (x) 1_BO, tr_BI(W2) = sigma (x) 1_AO
  LabeledOperator tr_ci = partial_trace(w.op, w.labels(Role::CI));
  double r1 = tr_ci.distance(trace_replace(tr_ci, w.labels(Role::BO)));
  LabeledOperator w2 = partial_trace(tr_ci, w.labels(Role::BO)) * Cplx(1.0 / d_bo);
  LabeledOperator tr_bi = partial_trace(w2, w.labels(Role::BI));
  double r2 = tr_bi.distance(trace_replace(tr_bi, w.labels(Role::AO)));
  rep.projector.residual = std::max(r1, r2);
  rep.projector.ok = rep.projector.residual <= tol;
  rep.marginal = rep.projector;

  rep.trace.residual = std::abs(w.op.trace() - Cplx(d_ao * d_bo));
  rep.trace.ok = rep.trace.residual <= tol * d_ao * d_bo;

  rep.pass = rep.psd.ok && rep.projector.ok && rep.trace.ok;
  return rep;
}

ProcessMatrix tripartite_reduced(const ProcessMatrix& w) {
  std::vector<std::string> drop = w.labels(Role::BO);
  const auto& ci = w.labels(Role::CI);
  drop.insert(drop.end(), ci.begin(), ci.end());
  LabeledOperator red = partial_trace(w.op, drop) * Cplx(1.0 / w.dim(Role::BO));
  return ProcessMatrix{red, bipartite_roles(w.labels(Role::AI), w.labels(Role::AO),
                                            w.labels(Role::BI))};
}

namespace {

// put the A_I factors in front: [A_I..., rest...]
std::vector<std::string> front_order(const ProcessMatrix& w) {
  std::vector<std::string> order = w.labels(Role::AI);
  for (const auto& f : w.op.layout().factors()) {
    bool in_ai = false;
    for (const auto& l : order)
      if (l == f.label) in_ai = true;
    if (!in_ai) order.push_back(f.label);
  }
  return order;
}

}  // namespace

Realization realization(const ProcessMatrix& w, double rank_tol) {
  ValidationReport val = validate_ordered(w, 1e-7);
  if (!val.pass)
    throw std::invalid_argument("realization: input is not a valid ordered process\n" +
                                val.to_string());

  const auto ai = w.labels(Role::AI);
  const int d_ai = w.dim(Role::AI);
  const double d_ao = w.dim(Role::AO);

  // sigma = tr_{AO BI}(W)/d_AO on A_I
  std::vector<std::string> aobi = w.labels(Role::AO);
  const auto& bi = w.labels(Role::BI);
  aobi.insert(aobi.end(), bi.begin(), bi.end());
  LabeledOperator sigma_op = partial_trace(w.op, aobi) * Cplx(1.0 / d_ao);

  Eigen::SelfAdjointEigenSolver<Mat> es(sigma_op.entries());
  Eigen::VectorXd lam = es.eigenvalues();
  Mat u = es.eigenvectors();
  int rank = 0;
  for (int i = 0; i < d_ai; ++i)
    if (lam(i) > rank_tol) ++rank;
  const bool full_rank = (rank == d_ai);

  // W with A_I factors in front, viewed as (A_I-composite) (x) rest
  LabeledOperator w_front = permute_subsystems(w.op, front_order(w));
  const int d_rest = w.op.dim() / d_ai;
  const Mat& wm = w_front.entries();

  SystemLayout aux = SystemLayout::single("aux", full_rank ? d_ai : rank);
  SystemLayout ai_lay;
  {
    std::vector<SystemLayout::Factor> fs;
    for (const auto& l : ai) fs.push_back({l, w.op.layout().dim_of(l)});
    ai_lay = SystemLayout(fs);
  }

  Realization out;
  if (full_rank) {
    // rho = (1 (x) sqrt(sigma)^T) |1>><<1| (1 (x) sqrt(sigma)^T),
    // choi = (sqrt(sigma)^-1 (x) 1) W (sqrt(sigma)^-1 (x) 1)
    Mat sq = u * lam.cwiseSqrt().asDiagonal() * u.adjoint();
    Mat sq_inv = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
    Vec chi = Vec::Zero(d_ai * d_ai);
    Mat b = sq.transpose();
    for (int i = 0; i < d_ai; ++i)
      for (int t = 0; t < d_ai; ++t) chi(i * d_ai + t) = b(t, i);
    Mat rho = chi * chi.adjoint();
    Mat g = Mat::Zero(d_ai * d_rest, d_ai * d_rest);
    for (int i = 0; i < d_ai; ++i)
      for (int j = 0; j < d_ai; ++j) {
        if (std::abs(sq_inv(i, j)) == 0.0) continue;
        g.block(i * d_rest, j * d_rest, d_rest, d_rest) =
            Mat::Identity(d_rest, d_rest) * sq_inv(i, j);
      }
    Mat choi = g * wm * g.adjoint();
    out.rho = LabeledOperator(ai_lay.concat(aux), std::move(rho));
    std::vector<SystemLayout::Factor> cf = {{"aux", d_ai}};
    for (int i = static_cast<int>(ai.size()); i < w_front.layout().size(); ++i)
      cf.push_back(w_front.layout().factor(i));
    out.choi = LabeledOperator(SystemLayout(cf), std::move(choi));
  } else {
    // compress aux onto the support of sigma (descending eigenvalues kept)
    Mat ur(d_ai, rank);
    Eigen::VectorXd lr(rank);
    int k = 0;
    for (int i = d_ai - 1; i >= 0 && k < rank; --i) {
      if (lam(i) > rank_tol) {
        ur.col(k) = u.col(i);
        lr(k) = lam(i);
        ++k;
      }
    }
    // |psi> = sum_k sqrt(l_k) |u_k>|k>
    Vec psi = Vec::Zero(d_ai * rank);
    for (int a = 0; a < d_ai; ++a)
      for (int kk = 0; kk < rank; ++kk) psi(a * rank + kk) = std::sqrt(lr(kk)) * ur(a, kk);
    Mat rho = psi * psi.adjoint();
    // choi = (L^-1/2 U^dag (x) 1) W (U L^-1/2 (x) 1)
    Mat red(rank * d_rest, d_ai * d_rest);
    Mat ul = ur * lr.cwiseSqrt().cwiseInverse().asDiagonal();  // d_ai x rank
    red.setZero();
    for (int kk = 0; kk < rank; ++kk)
      for (int b = 0; b < d_ai; ++b)
        red.block(kk * d_rest, b * d_rest, d_rest, d_rest) =
            Mat::Identity(d_rest, d_rest) * std::conj(ul(b, kk));
    Mat choi = red * wm * red.adjoint();
    out.rho = LabeledOperator(ai_lay.concat(aux), std::move(rho));
    std::vector<SystemLayout::Factor> cf = {{"aux", rank}};
    for (int i = static_cast<int>(ai.size()); i < w_front.layout().size(); ++i)
      cf.push_back(w_front.layout().factor(i));
    out.choi = LabeledOperator(SystemLayout(cf), std::move(choi));
  }
  return out;
}

LabeledOperator realization_reconstruct(const Realization& r, const ProcessMatrix& like) {
  LabeledOperator linked = link_product(r.rho, r.choi);
  return permute_subsystems(linked, like.op.layout().labels());
}

Realization dc_to_no_memory(const DCDecomposition& dec) {
  if (dec.empty()) throw std::invalid_argument("dc_to_no_memory: empty decomposition");
  const int n = static_cast<int>(dec.size());
  const SystemLayout& ai_lay = dec[0].state.layout();
  const SystemLayout& ch_lay = dec[0].choi.layout();
  const int d_ai = ai_lay.total_dim();
  const int d_ch = ch_lay.total_dim();

  Mat rho = Mat::Zero(d_ai * n, d_ai * n);
  Mat choi = Mat::Zero(n * d_ch, n * d_ch);
  for (int i = 0; i < n; ++i) {
    const auto& t = dec[i];
    if (t.state.layout() != ai_lay || t.choi.layout() != ch_lay)
      throw std::invalid_argument("dc_to_no_memory: inconsistent term layouts");
    // rho_sep += p_i rho_i (x) |i><i|   (aux least significant)
    for (int a = 0; a < d_ai; ++a)
      for (int b = 0; b < d_ai; ++b) rho(a * n + i, b * n + i) += t.p * t.state.entries()(a, b);
    choi.block(i * d_ch, i * d_ch, d_ch, d_ch) = t.choi.entries();
  }
  Realization out;
  out.rho = LabeledOperator(ai_lay.concat(SystemLayout::single("aux", n)), std::move(rho));
  out.choi = LabeledOperator(SystemLayout::single("aux", n).concat(ch_lay), std::move(choi));
  return out;
}

namespace {

void check_state(const LabeledOperator& rho, const char* who) {
  if (!psd_check(rho, 1e-8).psd || std::abs(rho.trace() - Cplx(1.0)) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": component is not a quantum state");
}

void check_channel(const LabeledOperator& choi, const std::vector<std::string>& bi,
                   const char* who) {
  if (!psd_check(choi, 1e-8).psd)
    throw std::invalid_argument(std::string(who) + ": Choi operator is not PSD");
  LabeledOperator marg = partial_trace(choi, bi);
  if (marg.distance(LabeledOperator::identity(marg.layout())) > 1e-8)
    throw std::invalid_argument(std::string(who) + ": tr_BI(choi) != identity");
}

}  // namespace

ProcessMatrix assemble_markov(const LabeledOperator& rho, const LabeledOperator& choi,
                              const RoleMap& roles) {
  check_state(rho, "assemble_markov");
  check_channel(choi, roles.at(Role::BI), "assemble_markov");
  ProcessMatrix w{tensor(rho, choi), roles};
  // canonical order [A_I..., A_O..., B_I...]
  std::vector<std::string> order = roles.at(Role::AI);
  for (const auto& l : roles.at(Role::AO)) order.push_back(l);
  for (const auto& l : roles.at(Role::BI)) order.push_back(l);
  w.op = permute_subsystems(w.op, order);
  return w;
}

ProcessMatrix assemble_cc(const LabeledOperator& rho_ai_bi, int d_ao, const RoleMap& roles) {
  check_state(rho_ai_bi, "assemble_cc");
  if (roles.at(Role::AO).size() != 1)
    throw std::invalid_argument("assemble_cc: expected a single A_O label");
  SystemLayout ao_lay = SystemLayout::single(roles.at(Role::AO)[0], d_ao);
  LabeledOperator w_op = tensor(rho_ai_bi, LabeledOperator::identity(ao_lay));
  std::vector<std::string> order = roles.at(Role::AI);
  for (const auto& l : roles.at(Role::AO)) order.push_back(l);
  for (const auto& l : roles.at(Role::BI)) order.push_back(l);
  return ProcessMatrix{permute_subsystems(w_op, order), roles};
}

ProcessMatrix assemble_dc(const DCDecomposition& dec, const RoleMap& roles) {
  if (dec.empty()) throw std::invalid_argument("assemble_dc: empty decomposition");
  double psum = 0.0;
  for (const auto& t : dec) {
    if (t.p < -1e-12) throw std::invalid_argument("assemble_dc: negative weight");
    psum += t.p;
    check_state(t.state, "assemble_dc");
    check_channel(t.choi, roles.at(Role::BI), "assemble_dc");
  }
  if (std::abs(psum - 1.0) > 1e-8)
    throw std::invalid_argument("assemble_dc: weights do not sum to 1");
  LabeledOperator acc = tensor(dec[0].state, dec[0].choi) * Cplx(dec[0].p);
  for (size_t i = 1; i < dec.size(); ++i)
    acc = acc + tensor(dec[i].state, dec[i].choi) * Cplx(dec[i].p);
  std::vector<std::string> order = roles.at(Role::AI);
  for (const auto& l : roles.at(Role::AO)) order.push_back(l);
  for (const auto& l : roles.at(Role::BI)) order.push_back(l);
  return ProcessMatrix{permute_subsystems(acc, order), roles};
}

ProcessMatrix assemble_ccdc(double p, const ProcessMatrix& w_cc, const ProcessMatrix& w_dc) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("assemble_ccdc: p outside [0,1]");
  if (w_cc.op.layout() != w_dc.op.layout())
    throw std::invalid_argument("assemble_ccdc: layout mismatch");
  return ProcessMatrix{w_cc.op * Cplx(p) + w_dc.op * Cplx(1.0 - p), w_cc.roles};
}

ProcessMatrix white_process(const ProcessMatrix& like) {
  double d_io = like.dim(Role::AI) * like.dim(Role::BI);
  if (like.tripartite()) d_io *= like.dim(Role::CI);
  return ProcessMatrix{LabeledOperator::identity(like.op.layout()) * Cplx(1.0 / d_io), like.roles};
}

namespace {

// clock phases on the composite A_I index of the full space
ProcessMatrix clock_sum(const ProcessMatrix& w, int k_from) {
  const auto& ai = w.labels(Role::AI);
  const int d = w.dim(Role::AI);
  const SystemLayout& lay = w.op.layout();
  const int dim = lay.total_dim();

  // composite A_I index per basis vector
  std::vector<int> ai_index(dim, 0);
  for (int x = 0; x < dim; ++x) {
    auto m = lay.multi(x);
    int v = 0;
    for (const auto& l : ai) {
      int p = lay.position(l);
      v = v * lay.factor(p).dim + m[p];
    }
    ai_index[x] = v;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  Mat acc = Mat::Zero(dim, dim);
  int terms = 0;
  for (int k = k_from; k < d; ++k) {
    ++terms;
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        double phase = two_pi * k * (ai_index[r] - ai_index[c]) / d;
        acc(r, c) += std::polar(1.0, phase) * w.op.entries()(r, c);
      }
  }
  return ProcessMatrix{LabeledOperator(lay, acc * (1.0 / terms)), w.roles};
}

}  // namespace

ProcessMatrix clock_twirl(const ProcessMatrix& w) { return clock_sum(w, 0); }

ProcessMatrix clock_twirl_punctured(const ProcessMatrix& w) {
  if (w.dim(Role::AI) < 2)
    throw std::invalid_argument("clock_twirl_punctured: d_AI must be >= 2");
  return clock_sum(w, 1);
}

ProcessMatrix depolarize(const ProcessMatrix& w, const std::vector<std::string>& on, double eta) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("depolarize: eta outside [0,1]");
  LabeledOperator mixed = trace_replace(w.op, on);
  return ProcessMatrix{w.op * Cplx(1.0 - eta) + mixed * Cplx(eta), w.roles};
}

ProcessMatrix white_mix(const ProcessMatrix& w, double r) {
  if (r < 0.0 || r > 1.0) throw std::invalid_argument("white_mix: r outside [0,1]");
  ProcessMatrix white = white_process(w);
  return ProcessMatrix{w.op * Cplx(1.0 - r) + white.op * Cplx(r), w.roles};
}

}  // namespace ccdc
