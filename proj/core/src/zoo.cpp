#include "ccdc/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ccdc {

namespace {

const Cplx kI(0.0, 1.0);

Mat pauli(char which) {
  Mat m(2, 2);
  switch (which) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli: unknown");
  }
  return m;
}

}  // namespace

Mat canonical_gate(Gate g, int d) {
  switch (g) {
    case Gate::Identity:
      return Mat::Identity(d, d);
    case Gate::PauliX:
    case Gate::PauliY:
    case Gate::PauliZ: {
      if (d != 2) throw std::invalid_argument("canonical_gate: Pauli gates are qubit gates");
      return pauli(g == Gate::PauliX ? 'X' : (g == Gate::PauliY ? 'Y' : 'Z'));
    }
    case Gate::Cnot: {
      if (d != 2) throw std::invalid_argument("canonical_gate: CNOT is a two-qubit gate");
      Mat m = Mat::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      return m;
    }
    case Gate::Swap: {
      Mat m = Mat::Zero(d * d, d * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i * d + j, j * d + i) = 1;
      return m;
    }
    case Gate::PartialSwap: {
      Mat s = canonical_gate(Gate::Swap, d);
      return (Mat::Identity(d * d, d * d) + kI * s) / std::sqrt(2.0);
    }
    case Gate::Clock: {
      Mat m = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i) m(i, i) = std::polar(1.0, 2.0 * std::numbers::pi * i / d);
      return m;
    }
  }
  throw std::invalid_argument("canonical_gate: unknown gate");
}

Mat canonical_gate(const std::string& name, int d) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), ::toupper);
  if (up == "IDENTITY") return canonical_gate(Gate::Identity, d);
  if (up == "PAULI_X") return canonical_gate(Gate::PauliX, d);
  if (up == "PAULI_Y") return canonical_gate(Gate::PauliY, d);
  if (up == "PAULI_Z") return canonical_gate(Gate::PauliZ, d);
  if (up == "CNOT") return canonical_gate(Gate::Cnot, d);
  if (up == "SWAP") return canonical_gate(Gate::Swap, d);
  if (up == "PARTIAL_SWAP") return canonical_gate(Gate::PartialSwap, d);
  if (up == "CLOCK") return canonical_gate(Gate::Clock, d);
  throw std::invalid_argument("canonical_gate: unknown name " + name);
}

LabeledOperator max_entangled(int d, const std::string& label_a, const std::string& label_b) {
  if (d < 2) throw std::invalid_argument("max_entangled: d must be >= 2");
  Vec v = Vec::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  SystemLayout lay({{label_a, d}, {label_b, d}});
  return LabeledOperator(lay, v * v.adjoint());
}

Vec choi_vector(const Mat& u) {
  const int din = static_cast<int>(u.cols());
  const int dout = static_cast<int>(u.rows());
  Vec v = Vec::Zero(din * dout);
  for (int i = 0; i < din; ++i)
    for (int o = 0; o < dout; ++o) v(i * dout + o) = u(o, i);
  return v;
}

LabeledOperator choi_of_unitary(const Mat& u, const SystemLayout& in_layout,
                                const SystemLayout& out_layout) {
  if (u.cols() != in_layout.total_dim() || u.rows() != out_layout.total_dim())
    throw std::invalid_argument("choi_of_unitary: dimension mismatch");
  Vec v = choi_vector(u);
  return LabeledOperator(in_layout.concat(out_layout), v * v.adjoint());
}

LabeledOperator choi_identity(const SystemLayout& in_layout, const SystemLayout& out_layout) {
  if (in_layout.total_dim() != out_layout.total_dim())
    throw std::invalid_argument("choi_identity: in/out dims differ");
  return choi_of_unitary(Mat::Identity(in_layout.total_dim(), in_layout.total_dim()), in_layout,
                         out_layout);
}

LabeledOperator choi_depolarizing(int d, double eta, const std::string& in_label,
                                  const std::string& out_label) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("choi_depolarizing: eta outside [0,1]");
  SystemLayout in = SystemLayout::single(in_label, d);
  SystemLayout out = SystemLayout::single(out_label, d);
  LabeledOperator id_choi = choi_identity(in, out);
  // Choi of rho -> tr(rho) 1/d is 1_in (x) 1_out / d
  Mat white = Mat::Identity(d * d, d * d) / static_cast<double>(d);
  return LabeledOperator(in.concat(out),
                         (1.0 - eta) * id_choi.entries() + eta * white);
}

namespace {

ProcessMatrix finish_bipartite(LabeledOperator op, const RoleMap& roles) {
  std::vector<std::string> order = roles.at(Role::AI);
  for (const auto& l : roles.at(Role::AO)) order.push_back(l);
  for (const auto& l : roles.at(Role::BI)) order.push_back(l);
  ProcessMatrix w{permute_subsystems(op, order), roles};
  ValidationReport rep = validate_ordered(w);
  if (!rep.pass)
    throw std::logic_error("canonical process failed validation\n" + rep.to_string());
  return w;
}

}  // namespace

ProcessMatrix w_ddd2(int d) {
  if (d < 2) throw std::invalid_argument("w_ddd2: d must be >= 2");
  RoleMap roles = bipartite_roles({"A_I"}, {"A_O"}, {"B_I1", "B_I2"});

  // circuit route: phi+ on (A_I, aux) linked into the identity decoder
  LabeledOperator phi = max_entangled(d, "A_I", "aux");
  SystemLayout in({{"aux", d}, {"A_O", d}});
  SystemLayout out({{"B_I1", d}, {"B_I2", d}});
  LabeledOperator circuit = link_product(phi, choi_identity(in, out));

  // closed form
  LabeledOperator closed = tensor(max_entangled(d, "A_I", "B_I1"),
                                  choi_identity(SystemLayout::single("A_O", d),
                                                SystemLayout::single("B_I2", d)));
  closed = permute_subsystems(closed, circuit.layout().labels());
  if (circuit.distance(closed) > 1e-12)
    throw std::logic_error("w_ddd2: circuit and closed-form routes disagree");
  return finish_bipartite(circuit, roles);
}

ProcessMatrix w_222() {
  // phi+ between A_I and aux; CNOT (control aux) with the control wire going
  // to Bob and the target discarded
  LabeledOperator phi = max_entangled(2, "A_I", "aux");
  SystemLayout in({{"aux", 2}, {"A_O", 2}});
  SystemLayout out({{"B_I", 2}, {"auxp", 2}});
  Mat u = canonical_gate(Gate::Cnot);
  LabeledOperator choi = choi_of_unitary(u, in, out);
  LabeledOperator circuit = partial_trace(link_product(phi, choi), {"auxp"});

  // GHZ closed form: (|GHZ>><<GHZ| + X^{AO} |GHZ>><<GHZ| X^{AO}) / 2
  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}});
  Vec ghz = Vec::Zero(8);
  ghz(0) = 1.0;
  ghz(7) = 1.0;
  Mat k = ghz * ghz.adjoint();
  Mat xo = tensor(LabeledOperator::identity(SystemLayout::single("A_I", 2)),
                  LabeledOperator(SystemLayout::single("A_O", 2), pauli('X')),
                  LabeledOperator::identity(SystemLayout::single("B_I", 2)))
               .entries();
  LabeledOperator closed(lay, 0.5 * (k + xo * k * xo));
  LabeledOperator circ = permute_subsystems(circuit, lay.labels());
  if (circ.distance(closed) > 1e-12)
    throw std::logic_error("w_222: circuit and closed-form routes disagree");
  return finish_bipartite(circ, bipartite_roles());
}

ProcessMatrix w_mrsr() {
  LabeledOperator phi = max_entangled(2, "A_I", "aux");
  SystemLayout in({{"A_O", 2}, {"aux", 2}});
  SystemLayout out({{"B_I", 2}, {"auxp", 2}});
  Mat u = canonical_gate(Gate::PartialSwap);
  LabeledOperator choi = choi_of_unitary(u, in, out);
  LabeledOperator circuit = partial_trace(link_product(phi, choi), {"auxp"});
  return finish_bipartite(circuit, bipartite_roles());
}

ProcessMatrix w_sep() {
  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}});
  auto proj = [](std::initializer_list<Cplx> amps) {
    Vec v(2);
    int i = 0;
    for (Cplx a : amps) v(i++) = a;
    v.normalize();
    Mat m = v * v.adjoint();
    return m;
  };
  Mat z0 = proj({1, 0}), z1 = proj({0, 1});
  Mat xp = proj({1, 1}), xm = proj({1, -1});

  auto term = [&](const Mat& a, const Mat& o, const Mat& b) {
    return tensor(LabeledOperator(SystemLayout::single("A_I", 2), a),
                  LabeledOperator(SystemLayout::single("A_O", 2), o),
                  LabeledOperator(SystemLayout::single("B_I", 2), b));
  };
  LabeledOperator closed =
      (term(z0, z0, z0) + term(z1, z0, z1) + term(xp, z1, xp) + term(xm, z1, xm)) * Cplx(0.5);

  // circuit route: phi+ with the measure-and-reprepare decoder
  LabeledOperator phi = max_entangled(2, "A_I", "aux");
  SystemLayout dec_lay({{"A_O", 2}, {"aux", 2}, {"B_I", 2}});
  auto dterm = [&](const Mat& o, const Mat& a, const Mat& b) {
    return tensor(LabeledOperator(SystemLayout::single("A_O", 2), o),
                  LabeledOperator(SystemLayout::single("aux", 2), a),
                  LabeledOperator(SystemLayout::single("B_I", 2), b));
  };
  // D = |0><0|^{AO} (x) (|00><00| + |11><11|) + |1><1|^{AO} (x) (|++><++| + |--><--|)
  LabeledOperator dec = dterm(z0, z0, z0) + dterm(z0, z1, z1) + dterm(z1, xp, xp) + dterm(z1, xm, xm);
  LabeledOperator circuit = link_product(phi, permute_subsystems(dec, dec_lay.labels()));
  circuit = permute_subsystems(circuit, lay.labels());
  if (circuit.distance(permute_subsystems(closed, lay.labels())) > 1e-12)
    throw std::logic_error("w_sep: circuit and closed-form routes disagree");
  return finish_bipartite(circuit, bipartite_roles());
}

ProcessMatrix w_ppt(double a) {
  if (a < 0.0 || a > 1.0) throw std::invalid_argument("w_ppt: a outside [0,1]");
  Mat m = Mat::Zero(8, 8);
  for (int i = 0; i < 4; ++i) m(i, i) = a;
  m(5, 5) = a;
  m(6, 6) = a;
  m(0, 5) = m(5, 0) = a;
  m(1, 6) = m(6, 1) = a;
  m(2, 7) = m(7, 2) = a;
  m(4, 4) = m(7, 7) = 0.5 * (1.0 + a);
  m(4, 7) = m(7, 4) = 0.5 * std::sqrt(1.0 - a * a);
  m /= (7.0 * a + 1.0);

  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}});
  return finish_bipartite(LabeledOperator(lay, 2.0 * m), bipartite_roles());
}

ProcessMatrix w_fb() {
  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}, {"B_O", 2},
                    {"C_I1", 2}, {"C_I2", 2}, {"C_I3", 2}});
  Vec v = Vec::Zero(lay.total_dim());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // branch 0: phi+^{A_I B_I} |1>>^{A_O C_I1} |1>>^{B_O C_I2} |0>^{C_I3}
  // branch 1: phi+^{A_I C_I1} |1>>^{A_O B_I} |1>>^{B_O C_I2} |1>^{C_I3}
  for (int ai = 0; ai < 2; ++ai)
    for (int ao = 0; ao < 2; ++ao)
      for (int bo = 0; bo < 2; ++bo) {
        {
          // bi = ai (phi+), ci1 = ao, ci2 = bo, ci3 = 0
          int idx = lay.flat({ai, ao, ai, bo, ao, bo, 0});
          v(idx) += inv_sqrt2 * inv_sqrt2;  // phi+ amplitude times 1/sqrt2
        }
        {
          // ci1 = ai (phi+), bi = ao, ci2 = bo, ci3 = 1
          int idx = lay.flat({ai, ao, ao, bo, ai, bo, 1});
          v(idx) += inv_sqrt2 * inv_sqrt2;
        }
      }
  LabeledOperator op(lay, v * v.adjoint());
  ProcessMatrix w{op, RoleMap{{Role::AI, {"A_I"}},
                              {Role::AO, {"A_O"}},
                              {Role::BI, {"B_I"}},
                              {Role::BO, {"B_O"}},
                              {Role::CI, {"C_I1", "C_I2", "C_I3"}}}};
  ValidationReport rep = validate_tripartite_ordered(w);
  if (!rep.pass) throw std::logic_error("w_fb failed validation\n" + rep.to_string());
  return w;
}

std::optional<ProcessMatrix> builtin_process(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), ::toupper);
  if (up == "W_222") return w_222();
  if (up == "W_222^2" || up == "W_2222" || up == "W_222_2") return w_ddd2(2);
  if (up == "W_333^2" || up == "W_3339" || up == "W_333_2") return w_ddd2(3);
  if (up == "W_MRSR") return w_mrsr();
  if (up == "W_SEP") return w_sep();
  if (up == "W_PPT") return w_ppt();
  if (up == "W_FB") return w_fb();
  if (up == "WHITE_222") return white_process(w_222());
  return std::nullopt;
}

std::vector<std::string> builtin_names() {
  return {"W_222", "W_222^2", "W_333^2", "W_MRSR", "W_SEP", "W_PPT", "W_FB", "WHITE_222"};
}

}  // namespace ccdc
