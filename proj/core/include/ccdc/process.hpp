#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccdc/operator.hpp"

namespace ccdc {

enum class Role { AI, AO, BI, BO, CI };

std::string role_name(Role r);
Role role_from_name(const std::string& s);

using RoleMap = std::map<Role, std::vector<std::string>>;

/// An ordered process: a labeled operator with causal-role tags.
/// Bipartite processes carry roles A_I, A_O, B_I; tripartite ones add B_O, C_I.
struct ProcessMatrix {
  LabeledOperator op;
  RoleMap roles;

  const std::vector<std::string>& labels(Role r) const;
  bool has_role(Role r) const { return roles.count(r) && !roles.at(r).empty(); }
  bool tripartite() const { return has_role(Role::BO) || has_role(Role::CI); }
  int dim(Role r) const { return op.layout().dim_of(labels(r)); }
};

/// Bipartite roles over the canonical labels A_I, A_O, B_I.
RoleMap bipartite_roles();
RoleMap bipartite_roles(const std::vector<std::string>& ai, const std::vector<std::string>& ao,
                        const std::vector<std::string>& bi);

struct ConditionCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Structured residual report for the ordered-process conditions.
struct ValidationReport {
  bool pass = false;
  ConditionCheck psd;        // residual = max(0, -lambda_min)
  ConditionCheck projector;  // ||W - L(W)||_max        (or comb span, tripartite)
  ConditionCheck trace;      // |tr W - d_AO(*d_BO)|
  ConditionCheck marginal;   // ||tr_BI W - sigma (x) 1_AO||_max
  std::string to_string() const;
};

ValidationReport validate_ordered(const ProcessMatrix& w, double tol = 1e-8);
ValidationReport validate_tripartite_ordered(const ProcessMatrix& w, double tol = 1e-8);

/// Ordered projector L_{A->B} using the process's own role tags.
LabeledOperator project_ordered(const ProcessMatrix& w);

/// tr_{B_O C_I}(W)/d_{B_O} with bipartite roles; the reduced object the
/// tripartite CC/DC definitions act on.
ProcessMatrix tripartite_reduced(const ProcessMatrix& w);

/// One term of a direct-cause mixture.
struct DCTerm {
  double p;
  LabeledOperator state;  // on A_I labels
  LabeledOperator choi;   // on A_O+B_I labels, tr_BI = 1^{AO}
};
using DCDecomposition = std::vector<DCTerm>;

/// Initial state + decoder channel realizing an ordered process.
struct Realization {
  LabeledOperator rho;   // on A_I + aux
  LabeledOperator choi;  // on aux + A_O + B_I
  std::string aux_label = "aux";
};

/// state/channel pair reproducing W (Moore-Penrose construction on the
/// support of sigma; aux dimension = rank(sigma)).
Realization realization(const ProcessMatrix& w, double rank_tol = 1e-10);
/// link(rho, choi) over aux, permuted back to w's label order.
LabeledOperator realization_reconstruct(const Realization& r, const ProcessMatrix& like);

/// Direct-cause mixture -> separable-state realization with classical memory:
/// rho_SEP = sum_i p_i rho_i (x) |i><i|, choi = sum_i |i><i| (x) D_i.
Realization dc_to_no_memory(const DCDecomposition& dec);

// --- assembly -------------------------------------------------------------

ProcessMatrix assemble_markov(const LabeledOperator& rho, const LabeledOperator& choi,
                              const RoleMap& roles = bipartite_roles());
ProcessMatrix assemble_cc(const LabeledOperator& rho_ai_bi, int d_ao = 2,
                          const RoleMap& roles = bipartite_roles());
ProcessMatrix assemble_dc(const DCDecomposition& dec, const RoleMap& roles = bipartite_roles());
ProcessMatrix assemble_ccdc(double p, const ProcessMatrix& w_cc, const ProcessMatrix& w_dc);

/// The white-noise process 1/(d_AI d_BI) (bipartite) or 1/(d_AI d_BI d_CI).
ProcessMatrix white_process(const ProcessMatrix& like);

// --- noise maps -------------------------------------------------------------

/// Full clock twirl on A_I: (1/d) sum_k Z^k W Z^-k. Entanglement breaking.
ProcessMatrix clock_twirl(const ProcessMatrix& w);
/// The k>=1 part alone: (1/(d-1)) sum_{k=1}^{d-1} Z^k W Z^-k.
ProcessMatrix clock_twirl_punctured(const ProcessMatrix& w);
/// (1-eta) W + eta TR_X(W) on the given labels.
ProcessMatrix depolarize(const ProcessMatrix& w, const std::vector<std::string>& on, double eta);
/// (1-r) W + r white_process.
ProcessMatrix white_mix(const ProcessMatrix& w, double r);

}  // namespace ccdc
