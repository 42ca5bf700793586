#pragma once

#include <optional>
#include <string>

#include "ccdc/process.hpp"

namespace ccdc {

// --- gates and elementary objects -------------------------------------------

enum class Gate { Identity, PauliX, PauliY, PauliZ, Cnot, Swap, PartialSwap, Clock };

/// Unitary matrix for a named gate. `d` is the local dimension where it
/// applies (SWAP/PARTIAL_SWAP act on d (x) d, CLOCK on d; CNOT and Paulis are
/// fixed-size and reject d != 2).
Mat canonical_gate(Gate g, int d = 2);
Mat canonical_gate(const std::string& name, int d = 2);

/// |phi+><phi+| with |phi+> = (1/sqrt d) sum_i |ii> on two labeled factors.
LabeledOperator max_entangled(int d, const std::string& label_a, const std::string& label_b);

/// Choi vector |U>> = sum_i |i> (x) U|i>.
Vec choi_vector(const Mat& u);
/// Choi operator |U>><<U| on in_layout (x) out_layout.
LabeledOperator choi_of_unitary(const Mat& u, const SystemLayout& in_layout,
                                const SystemLayout& out_layout);
/// Choi of the identity channel: |1>><<1| on the given in/out layouts.
LabeledOperator choi_identity(const SystemLayout& in_layout, const SystemLayout& out_layout);
/// Choi of the depolarizing channel rho -> (1-eta) rho + eta 1/d on one factor.
LabeledOperator choi_depolarizing(int d, double eta, const std::string& in_label,
                                  const std::string& out_label);

// --- canonical processes -----------------------------------------------------

/// |phi+><phi+|^{A_I B_I1} (x) |1>><<1|^{A_O B_I2}; the maximally robust
/// process in its scenario. d >= 2.
ProcessMatrix w_ddd2(int d);
/// The minimal-dimension process built from phi+ and a CNOT decoder.
ProcessMatrix w_222();
/// phi+ followed by the partial-swap decoder (1 + i SWAP)/sqrt 2.
ProcessMatrix w_mrsr();
/// Separable-but-not-direct-cause process (four product terms).
ProcessMatrix w_sep();
/// d_AO * rho_a^{2x4} built on the bound-entangled 2x4 family; a in [0,1].
ProcessMatrix w_ppt(double a = 0.5);
/// Pure tripartite A->B->C process superposing common-cause and direct-cause
/// branches.
ProcessMatrix w_fb();

/// Case-insensitive builtin registry (W_222, W_222^2, W_333^2, W_MRSR, W_SEP,
/// W_PPT, W_FB, WHITE_222). Returns nullopt for unknown names.
std::optional<ProcessMatrix> builtin_process(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace ccdc
