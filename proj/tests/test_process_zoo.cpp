#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccdc/process.hpp"
#include "ccdc/zoo.hpp"
#include "oracles.hpp"

using namespace ccdc;

TEST_CASE("max_entangled") {
  for (int d : {2, 3}) {
    auto phi = max_entangled(d, "A", "B");
    CHECK(std::abs(phi.trace() - Cplx(1.0)) < 1e-14);
    auto ev = hermitian_eigenvalues(phi.entries());
    CHECK(ev.maxCoeff() == doctest::Approx(1.0));  // pure
    for (const char* l : {"A", "B"}) {
      auto red = partial_trace(phi, {l});
      CHECK((red.entries() - Mat::Identity(d, d) / double(d)).cwiseAbs().maxCoeff() < 1e-14);
    }
    // overlap with SWAP: SWAP fixes every |jj>, so <phi+|SWAP|phi+> = 1
    Mat swap = canonical_gate(Gate::Swap, d);
    CHECK(std::abs((swap * phi.entries()).trace() - Cplx(1.0)) < 1e-13);
  }
  CHECK_THROWS(max_entangled(1, "A", "B"));
}

TEST_CASE("canonical gates") {
  Mat cnot = canonical_gate("CNOT");
  Mat expect(4, 4);
  expect << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  CHECK((cnot - expect).cwiseAbs().maxCoeff() == 0.0);

  Mat ps = canonical_gate(Gate::PartialSwap, 2);
  CHECK((ps * ps.adjoint() - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  Mat z3 = canonical_gate(Gate::Clock, 3);
  CHECK((z3 * z3 * z3 - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(z3.trace()) < 1e-14);

  for (const char* n : {"SWAP", "PAULI_X", "PAULI_Y", "PAULI_Z", "IDENTITY"}) {
    Mat u = canonical_gate(n, 2);
    CHECK((u * u.adjoint() - Mat::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS(canonical_gate("NOPE"));
  CHECK_THROWS(canonical_gate("CNOT", 3));
}

TEST_CASE("W_222 Pauli decomposition") {
  auto w = w_222();
  Mat id = Mat::Identity(2, 2);
  Mat sx = canonical_gate(Gate::PauliX), sy = canonical_gate(Gate::PauliY),
      sz = canonical_gate(Gate::PauliZ);
  auto kron3 = [&](const Mat& a, const Mat& b, const Mat& c) {
    return oracle::naive_kron(oracle::naive_kron(a, b), c);
  };
  Mat pauli_form = 0.25 * (kron3(id, id, id) + kron3(sz, id, sz) + kron3(sx, sx, sx) -
                           kron3(sy, sx, sy));
  CHECK((w.op.entries() - pauli_form).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("canonical processes validate; W_PPT variants") {
  CHECK(validate_ordered(w_222()).pass);
  CHECK(validate_ordered(w_ddd2(2)).pass);
  CHECK(validate_ordered(w_ddd2(3)).pass);
  CHECK(validate_ordered(w_mrsr()).pass);
  CHECK(validate_ordered(w_sep()).pass);
  CHECK(validate_ordered(w_ppt(0.0)).pass);
  CHECK(validate_ordered(w_ppt(0.5)).pass);
  CHECK(validate_ordered(w_ppt(1.0)).pass);
  CHECK_THROWS(w_ppt(1.5));
  CHECK_THROWS(w_ddd2(1));
}

TEST_CASE("W_ddd2 maps channels to their Choi operator: W * Lambda = Lambda/d") {
  std::mt19937_64 rng(101);
  for (int d : {2, 3}) {
    auto w = w_ddd2(d);
    for (int rep = 0; rep < 5; ++rep) {
      // random unitary channel Choi on A_I -> A_O
      Mat u = oracle::random_unitary(d, rng);
      auto lam = choi_of_unitary(u, SystemLayout::single("A_I", d),
                                 SystemLayout::single("A_O", d));
      auto out = link_product(w.op, lam);
      // out lives on B_I1 (x) B_I2 and must equal Lambda/d entrywise
      CHECK(out.dim() == d * d);
      CHECK((out.entries() - lam.entries() / double(d)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("validate_ordered diagnostics") {
  // GHZ alone rescaled to trace 2 fails the projector condition
  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}});
  Vec ghz = Vec::Zero(8);
  ghz(0) = ghz(7) = 1.0;
  ProcessMatrix bad{LabeledOperator(lay, ghz * ghz.adjoint()), bipartite_roles()};
  auto rep = validate_ordered(bad);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.projector.ok);
  CHECK(rep.psd.ok);
  CHECK(rep.trace.ok);

  // white-noise process passes
  CHECK(validate_ordered(white_process(bad)).pass);
}

TEST_CASE("both ordered-process characterizations agree") {
  std::mt19937_64 rng(103);
  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}});
  // valid processes: assembled Markov with random components
  for (int rep = 0; rep < 10; ++rep) {
    Mat rho = oracle::random_density(2, rng);
    Mat u = oracle::random_unitary(2, rng);
    auto choi = choi_of_unitary(u, SystemLayout::single("A_O", 2),
                                SystemLayout::single("B_I", 2));
    auto w = assemble_markov(LabeledOperator(SystemLayout::single("A_I", 2), rho), choi);
    auto v = validate_ordered(w);
    CHECK(v.pass);
    CHECK(v.marginal.ok);  // Eq-22 route
  }
  // random Hermitian perturbations of a valid process break both routes together
  auto w0 = w_222();
  for (int rep = 0; rep < 10; ++rep) {
    Mat pert = oracle::random_hermitian(8, rng) * 0.05;
    ProcessMatrix wp{LabeledOperator(lay, w0.op.entries() + pert), bipartite_roles()};
    auto v = validate_ordered(wp);
    // projector (Eq-23) and marginal (Eq-22) conditions agree on pass/fail
    CHECK(v.projector.ok == v.marginal.ok);
    CHECK_FALSE(v.pass);
  }
}

TEST_CASE("assemble: markov, cc, dc, ccdc") {
  std::mt19937_64 rng(107);
  // MARKOV(1/2, identity Choi) = (1/2) (x) |1>><<1|
  auto rho = LabeledOperator(SystemLayout::single("A_I", 2), Mat::Identity(2, 2) / 2.0);
  auto id_choi = choi_identity(SystemLayout::single("A_O", 2), SystemLayout::single("B_I", 2));
  auto w = assemble_markov(rho, id_choi);
  CHECK(validate_ordered(w).pass);
  CHECK(w.op.distance(tensor(rho, id_choi)) < 1e-14);

  // CC(|phi+><phi+|) equals the SWAP-circuit form
  auto phi = max_entangled(2, "A_I", "B_I");
  auto wcc = assemble_cc(phi);
  CHECK(validate_ordered(wcc).pass);
  {
    auto rho_ax = max_entangled(2, "A_I", "aux");
    auto swap_choi = choi_of_unitary(canonical_gate(Gate::Swap, 2),
                                     SystemLayout({{"A_O", 2}, {"aux", 2}}),
                                     SystemLayout({{"B_I", 2}, {"auxp", 2}}));
    auto circuit = partial_trace(link_product(rho_ax, swap_choi), {"auxp"});
    circuit = permute_subsystems(circuit, {"A_I", "A_O", "B_I"});
    CHECK(wcc.op.distance(circuit) < 1e-12);
  }

  // DC regrouping of W_SEP's product terms: the D blocks are not channels
  // (tr_BI(|0><0| (x) |0><0|) = |0><0| != 1), so the constructor rejects
  DCDecomposition bad;
  Mat z0 = Mat::Zero(2, 2);
  z0(0, 0) = 1.0;
  bad.push_back({1.0, LabeledOperator(SystemLayout::single("A_I", 2), z0),
                 LabeledOperator(SystemLayout({{"A_O", 2}, {"B_I", 2}}),
                                 2.0 * oracle::naive_kron(z0, z0))});
  CHECK_THROWS(assemble_dc(bad));

  // two-term DC mixture assembles and validates
  DCDecomposition dec;
  dec.push_back({0.25, LabeledOperator(SystemLayout::single("A_I", 2),
                                       oracle::random_density(2, rng)),
                 id_choi});
  dec.push_back({0.75, LabeledOperator(SystemLayout::single("A_I", 2),
                                       oracle::random_density(2, rng)),
                 choi_depolarizing(2, 1.0, "A_O", "B_I")});
  auto wdc = assemble_dc(dec);
  CHECK(validate_ordered(wdc).pass);

  auto wccdc = assemble_ccdc(0.3, wcc, wdc);
  CHECK(validate_ordered(wccdc).pass);
  CHECK_THROWS(assemble_ccdc(1.3, wcc, wdc));
}

TEST_CASE("realization round trips") {
  std::mt19937_64 rng(109);
  // W_222^2
  auto w = w_ddd2(2);
  auto r = realization(w);
  CHECK(realization_reconstruct(r, w).distance(w.op) < 1e-8);
  CHECK(psd_check(r.rho).psd);
  CHECK(std::abs(r.rho.trace() - Cplx(1.0)) < 1e-10);
  // channel condition on the support
  auto marg = partial_trace(r.choi, {"B_I1", "B_I2"});
  CHECK(marg.distance(LabeledOperator::identity(marg.layout())) < 1e-8);

  // Markov case: sigma = rho0, product-form rho
  Mat rho0 = oracle::random_density(2, rng);
  auto wm = assemble_markov(LabeledOperator(SystemLayout::single("A_I", 2), rho0),
                            choi_identity(SystemLayout::single("A_O", 2),
                                          SystemLayout::single("B_I", 2)));
  auto rm = realization(wm);
  auto sigma = partial_trace(rm.rho, {"aux"});
  CHECK((sigma.entries() - rho0).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(realization_reconstruct(rm, wm).distance(wm.op) < 1e-8);

  // white-noise process: sigma = 1/2, rho = |phi+><phi+|
  auto ww = white_process(wm);
  auto rw = realization(ww);
  CHECK(rw.rho.distance(max_entangled(2, "A_I", "aux")) < 1e-9);
  CHECK(realization_reconstruct(rw, ww).distance(ww.op) < 1e-8);

  // rank-deficient sigma: W_222 has sigma = |phi-ish pure? no: check via CC on a pure state
  auto wcc = assemble_cc(max_entangled(2, "A_I", "B_I"));
  auto rc = realization(wcc);
  CHECK(realization_reconstruct(rc, wcc).distance(wcc.op) < 1e-8);
}

TEST_CASE("rank-deficient realization compresses aux") {
  // CC process from a pure product state: sigma is rank 1
  Mat z0 = Mat::Zero(2, 2);
  z0(0, 0) = 1.0;
  Mat rho = oracle::naive_kron(z0, z0);
  auto wcc = assemble_cc(LabeledOperator(SystemLayout({{"A_I", 2}, {"B_I", 2}}), rho));
  auto r = realization(wcc);
  CHECK(r.rho.layout().dim_of("aux") == 1);
  CHECK(realization_reconstruct(r, wcc).distance(wcc.op) < 1e-8);
}

TEST_CASE("dc_to_no_memory") {
  std::mt19937_64 rng(113);
  auto id_choi = choi_identity(SystemLayout::single("A_O", 2), SystemLayout::single("B_I", 2));
  auto dep_choi = choi_depolarizing(2, 1.0, "A_O", "B_I");

  // single term reduces to Markov form (d_aux = 1)
  DCDecomposition one;
  one.push_back({1.0, LabeledOperator(SystemLayout::single("A_I", 2),
                                      oracle::random_density(2, rng)),
                 id_choi});
  auto r1 = dc_to_no_memory(one);
  CHECK(r1.rho.layout().dim_of("aux") == 1);

  // two-term decomposition reconstructs sum p_i rho_i (x) D_i
  DCDecomposition dec;
  dec.push_back({0.4, LabeledOperator(SystemLayout::single("A_I", 2),
                                      oracle::random_density(2, rng)),
                 id_choi});
  dec.push_back({0.6, LabeledOperator(SystemLayout::single("A_I", 2),
                                      oracle::random_density(2, rng)),
                 dep_choi});
  auto r = dc_to_no_memory(dec);
  auto w = assemble_dc(dec);
  auto rec = link_product(r.rho, r.choi);
  CHECK(permute_subsystems(rec, {"A_I", "A_O", "B_I"}).distance(w.op) < 1e-10);
  // rho_SEP marginal structure: tr_aux gives sum p_i rho_i
  auto red = partial_trace(r.rho, {"aux"});
  Mat expect = 0.4 * dec[0].state.entries() + 0.6 * dec[1].state.entries();
  CHECK((red.entries() - expect).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(dc_to_no_memory({}));
}

TEST_CASE("noise maps") {
  auto w = w_222();

  // WHITE_MIX(0) is the identity
  CHECK(white_mix(w, 0.0).op.distance(w.op) < 1e-14);
  CHECK_THROWS(white_mix(w, 1.0001));

  // full twirl = (1/d) W + (1-1/d) punctured twirl
  auto full = clock_twirl(w);
  auto punct = clock_twirl_punctured(w);
  CHECK(full.op.distance(w.op * Cplx(0.5) + punct.op * Cplx(0.5)) < 1e-12);
  CHECK(validate_ordered(full).pass);
  CHECK(validate_ordered(punct).pass);

  // DEPOLARIZE(A_I, eta) on W_222: (1-eta) W + eta 1/4 (tr_AI W_222 = 1/4)
  auto dep = depolarize(w, {"A_I"}, 2.0 / 3.0);
  auto expect = white_mix(w, 2.0 / 3.0);
  CHECK(dep.op.distance(expect.op) < 1e-12);
  CHECK_THROWS(depolarize(w, {"A_I"}, -0.1));
}

TEST_CASE("tripartite validation") {
  auto w = w_fb();
  CHECK(validate_tripartite_ordered(w).pass);
  CHECK(std::abs(w.op.trace() - Cplx(4.0)) < 1e-12);

  // product of independent states with the right trace but no comb structure
  std::mt19937_64 rng(127);
  Mat big = oracle::random_density(128, rng) * 4.0;
  ProcessMatrix bad{LabeledOperator(w.op.layout(), big), w.roles};
  CHECK_FALSE(validate_tripartite_ordered(bad).pass);

  // bipartite process on a trivial B_O/C_I extension passes
  auto w222 = w_222();
  SystemLayout ext = w222.op.layout().concat(SystemLayout({{"B_O", 1}, {"C_I", 1}}));
  ProcessMatrix lifted{LabeledOperator(ext, w222.op.entries()),
                       RoleMap{{Role::AI, {"A_I"}},
                               {Role::AO, {"A_O"}},
                               {Role::BI, {"B_I"}},
                               {Role::BO, {"B_O"}},
                               {Role::CI, {"C_I"}}}};
  CHECK(validate_tripartite_ordered(lifted).pass);

  // reduced bipartite object of the lifted process is W_222 again
  auto red = tripartite_reduced(lifted);
  CHECK(red.op.distance(w222.op) < 1e-12);
  CHECK(validate_ordered(red).pass);
}

TEST_CASE("builtin registry") {
  CHECK(builtin_process("w_222").has_value());
  CHECK(builtin_process("W_222^2").has_value());
  CHECK(builtin_process("W_PPT").has_value());
  CHECK_FALSE(builtin_process("W_NOPE").has_value());
  for (const auto& n : builtin_names()) {
    auto w = builtin_process(n);
    REQUIRE(w.has_value());
    if (!w->tripartite()) CHECK(validate_ordered(*w).pass);
  }
}
