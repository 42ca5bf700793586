#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccdc/operator.hpp"
#include "ccdc/zoo.hpp"
#include "oracles.hpp"

using namespace ccdc;

namespace {

LabeledOperator random_op(const SystemLayout& lay, std::mt19937_64& rng) {
  return LabeledOperator(lay, oracle::random_hermitian(lay.total_dim(), rng));
}

}  // namespace

TEST_CASE("layout indexing round trips") {
  SystemLayout lay({{"a", 2}, {"b", 3}, {"c", 2}});
  CHECK(lay.total_dim() == 12);
  for (int i = 0; i < 12; ++i) CHECK(lay.flat(lay.multi(i)) == i);
  // first factor most significant
  CHECK(lay.flat({1, 0, 0}) == 6);
  CHECK(lay.flat({0, 0, 1}) == 1);
  CHECK_THROWS(SystemLayout({{"a", 2}, {"a", 2}}));
}

TEST_CASE("tensor of identities and basis projectors") {
  auto id2 = LabeledOperator::identity(SystemLayout::single("x", 2));
  auto id3 = LabeledOperator::identity(SystemLayout::single("y", 3));
  auto t = tensor(id2, id3);
  CHECK(t.entries().isApprox(Mat::Identity(6, 6)));

  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  auto t2 = tensor(LabeledOperator(SystemLayout::single("x", 2), p0),
                   LabeledOperator(SystemLayout::single("y", 2), p1));
  Mat expect = Mat::Zero(4, 4);
  expect(1, 1) = 1;  // |01><01|
  CHECK(t2.entries().isApprox(expect));

  CHECK_THROWS(tensor(id2, id2));  // duplicate label
}

TEST_CASE("tensor matches brute-force kron on random states") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    Mat a = oracle::random_density(2, rng), b = oracle::random_density(2, rng);
    auto t = tensor(LabeledOperator(SystemLayout::single("x", 2), a),
                    LabeledOperator(SystemLayout::single("y", 2), b));
    CHECK((t.entries() - oracle::naive_kron(a, b)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("permute_subsystems") {
  // |01><01| reversed -> |10><10|
  SystemLayout lay({{"x", 2}, {"y", 2}});
  Mat m = Mat::Zero(4, 4);
  m(1, 1) = 1;
  auto p = permute_subsystems(LabeledOperator(lay, m), {"y", "x"});
  CHECK(p.entries()(2, 2) == Cplx(1.0));

  // SWAP is permutation symmetric
  Mat swap = canonical_gate(Gate::Swap, 2);
  auto s = LabeledOperator(lay, swap);
  CHECK(permute_subsystems(s, {"y", "x"}).entries().isApprox(swap));

  // round trip on a random 3-factor operator
  std::mt19937_64 rng(3);
  SystemLayout lay3({{"a", 2}, {"b", 3}, {"c", 2}});
  auto x = random_op(lay3, rng);
  auto back = permute_subsystems(permute_subsystems(x, {"c", "a", "b"}), {"a", "b", "c"});
  CHECK(x.distance(back) < 1e-14);

  CHECK_THROWS(permute_subsystems(x, {"a", "b"}));
  CHECK_THROWS(permute_subsystems(x, {"a", "b", "b"}));
}

TEST_CASE("partial_trace basics and brute-force agreement") {
  auto phi = max_entangled(2, "A", "B");
  auto red = partial_trace(phi, {"B"});
  CHECK(red.entries().isApprox(Mat::Identity(2, 2) / 2.0));
  CHECK(std::abs(red.trace() - phi.trace()) < 1e-14);

  std::mt19937_64 rng(11);
  SystemLayout lay({{"a", 2}, {"b", 2}, {"c", 2}});
  auto x = random_op(lay, rng);
  auto mid = partial_trace(x, {"b"});
  Mat expect = oracle::naive_partial_trace(x.entries(), {2, 2, 2}, 1);
  CHECK((mid.entries() - expect).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS(partial_trace(x, {"zzz"}));
}

TEST_CASE("w_sep marginal over B_I is maximally mixed on A_I A_O") {
  auto w = w_sep();
  auto marg = partial_trace(w.op, {"B_I"});
  CHECK((marg.entries() - 0.5 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_transpose involution and spectra") {
  std::mt19937_64 rng(5);
  SystemLayout lay({{"a", 2}, {"b", 3}});
  auto x = random_op(lay, rng);
  CHECK(partial_transpose(partial_transpose(x, {"a"}), {"a"}).distance(x) < 1e-14);
  CHECK(std::abs(partial_transpose(x, {"a"}).trace() - x.trace()) < 1e-14);

  // product case: (rho (x) sigma)^{T_a} = rho^T (x) sigma
  Mat r = oracle::random_density(2, rng), s = oracle::random_density(3, rng);
  auto prod = tensor(LabeledOperator(SystemLayout::single("a", 2), r),
                     LabeledOperator(SystemLayout::single("b", 3), s));
  CHECK((partial_transpose(prod, {"a"}).entries() - oracle::naive_kron(r.transpose(), s))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  // |phi+><phi+|^{T_B} has minimum eigenvalue -1/2
  auto phi = max_entangled(2, "A", "B");
  auto pt = partial_transpose(phi, {"B"});
  Eigen::VectorXd ev = hermitian_eigenvalues(pt.entries());
  CHECK(ev.minCoeff() == doctest::Approx(-0.5).epsilon(1e-12));

  // the 2x4 bound-entangled family is PPT on the 2-dim factor
  auto wppt = w_ppt(0.5);
  auto ptw = partial_transpose(wppt.op, {"A_I"});
  CHECK(psd_check(ptw, 1e-9).psd);
}

TEST_CASE("partial_trace commutes with partial_transpose on disjoint labels") {
  std::mt19937_64 rng(13);
  SystemLayout lay({{"a", 2}, {"b", 2}, {"c", 3}});
  auto x = random_op(lay, rng);
  auto lhs = partial_trace(partial_transpose(x, {"a"}), {"c"});
  auto rhs = partial_transpose(partial_trace(x, {"c"}), {"a"});
  CHECK(lhs.distance(rhs) < 1e-13);
}

TEST_CASE("link product: disjoint labels reduce to tensor") {
  std::mt19937_64 rng(17);
  auto a = LabeledOperator(SystemLayout::single("a", 2), oracle::random_hermitian(2, rng));
  auto b = LabeledOperator(SystemLayout::single("b", 3), oracle::random_hermitian(3, rng));
  CHECK(link_product(a, b).distance(tensor(a, b)) < 1e-13);
}

TEST_CASE("link product: identical labels give tr(M^T rho)") {
  std::mt19937_64 rng(19);
  SystemLayout lay = SystemLayout::single("a", 3);
  Mat rho = oracle::random_density(3, rng);
  Mat m = oracle::random_hermitian(3, rng);
  auto linked = link_product(LabeledOperator(lay, rho), LabeledOperator(lay, m));
  CHECK(linked.dim() == 1);
  Cplx expect = (m.transpose() * rho).trace();
  CHECK(std::abs(linked.entries()(0, 0) - expect) < 1e-13);
}

TEST_CASE("link product vs direct channel application (depolarizing)") {
  std::mt19937_64 rng(23);
  for (double eta : {0.0, 0.3, 1.0}) {
    auto kraus = oracle::depolarizing_kraus(eta);
    auto choi = choi_depolarizing(2, eta, "in", "out");
    // Choi built from Kraus agrees with the library constructor
    CHECK((choi.entries() - oracle::choi_from_kraus(kraus)).cwiseAbs().maxCoeff() < 1e-13);
    for (int rep = 0; rep < 3; ++rep) {
      Mat rho = oracle::random_density(2, rng);
      auto out = apply_channel(choi, LabeledOperator(SystemLayout::single("in", 2), rho));
      Mat expect = oracle::apply_kraus(kraus, rho);
      CHECK((out.entries() - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  // rho = |0><0| through eta-depolarizing: (1-eta)|0><0| + eta 1/2
  Mat rho0 = Mat::Zero(2, 2);
  rho0(0, 0) = 1;
  auto out = apply_channel(choi_depolarizing(2, 0.4, "in", "out"),
                           LabeledOperator(SystemLayout::single("in", 2), rho0));
  Mat expect = 0.6 * rho0 + 0.4 * Mat::Identity(2, 2) / 2.0;
  CHECK((out.entries() - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("apply_channel: identity channel and CNOT conjugation") {
  std::mt19937_64 rng(29);
  auto id_choi = choi_identity(SystemLayout::single("in", 3), SystemLayout::single("out", 3));
  Mat rho = oracle::random_density(3, rng);
  auto out = apply_channel(id_choi, LabeledOperator(SystemLayout::single("in", 3), rho));
  CHECK((out.entries() - rho).cwiseAbs().maxCoeff() < 1e-13);

  // CNOT on |10> -> |11>
  Mat u = canonical_gate(Gate::Cnot);
  auto choi = choi_of_unitary(u, SystemLayout({{"i1", 2}, {"i2", 2}}),
                              SystemLayout({{"o1", 2}, {"o2", 2}}));
  Mat rho10 = Mat::Zero(4, 4);
  rho10(2, 2) = 1;
  auto out2 = apply_channel(choi, LabeledOperator(SystemLayout({{"i1", 2}, {"i2", 2}}), rho10));
  Mat expect = Mat::Zero(4, 4);
  expect(3, 3) = 1;
  CHECK((out2.entries() - expect).cwiseAbs().maxCoeff() < 1e-13);
  // agrees with direct unitary conjugation on random states
  Mat rho2 = oracle::random_density(4, rng);
  auto out3 = apply_channel(choi, LabeledOperator(SystemLayout({{"i1", 2}, {"i2", 2}}), rho2));
  CHECK((out3.entries() - u * rho2 * u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clock twirl Choi equals sum_i |ii><ii|") {
  for (int d : {2, 3}) {
    Mat z = canonical_gate(Gate::Clock, d);
    // build the twirl Choi by averaging conjugated identity Chois
    SystemLayout in = SystemLayout::single("in", d), out = SystemLayout::single("out", d);
    Mat acc = Mat::Zero(d * d, d * d);
    for (int k = 0; k < d; ++k) {
      Mat zk = Mat::Identity(d, d);
      for (int t = 0; t < k; ++t) zk = zk * z;
      acc += choi_of_unitary(zk, in, out).entries();
    }
    acc /= d;
    Mat expect = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i) expect(i * d + i, i * d + i) = 1.0;
    CHECK((acc - expect).cwiseAbs().maxCoeff() < 1e-12);
    // applying it dephases
    std::mt19937_64 rng(31);
    Mat rho = oracle::random_density(d, rng);
    auto outop = apply_channel(LabeledOperator(in.concat(out), acc),
                               LabeledOperator(in, rho));
    CHECK((outop.entries() - Mat(rho.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("trace_replace basics") {
  std::mt19937_64 rng(37);
  SystemLayout lay({{"a", 2}, {"b", 2}, {"c", 2}});
  auto id = LabeledOperator::identity(lay);
  CHECK(trace_replace(id, {"b"}).distance(id) < 1e-14);

  auto phi = max_entangled(2, "A", "B");
  auto tr = trace_replace(phi, {"A"});
  CHECK((tr.entries() - Mat::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-14);

  // composition: TR_{AO} o TR_{BI} = TR_{AO BI}
  auto x = random_op(lay, rng);
  auto lhs = trace_replace(trace_replace(x, {"c"}), {"b"});
  auto rhs = trace_replace(x, {"b", "c"});
  CHECK(lhs.distance(rhs) < 1e-13);
  CHECK(std::abs(trace_replace(x, {"a"}).trace() - x.trace()) < 1e-13);
}

TEST_CASE("ordered projector: fixed points, idempotence, trace preservation") {
  auto w222 = w_222();
  CHECK(project_ordered(w222).distance(w222.op) < 1e-12);

  std::mt19937_64 rng(41);
  SystemLayout lay({{"A_I", 2}, {"A_O", 2}, {"B_I", 2}});
  for (int rep = 0; rep < 20; ++rep) {
    auto x = random_op(lay, rng);
    auto l1 = project_ordered(x, {"A_O"}, {"B_I"});
    auto l2 = project_ordered(l1, {"A_O"}, {"B_I"});
    CHECK(l1.distance(l2) < 1e-12);
    CHECK(std::abs(l1.trace() - x.trace()) < 1e-12);
  }

  // GHZ-weighted mixture with epsilon > 0 falls outside the ordered span
  Vec ghz = Vec::Zero(8);
  ghz(0) = ghz(7) = 1.0;
  Mat k = ghz * ghz.adjoint();
  Mat xo = oracle::naive_kron(oracle::naive_kron(Mat::Identity(2, 2), canonical_gate(Gate::PauliX)),
                              Mat::Identity(2, 2));
  double eps = 0.25;
  Mat biased = (0.5 + eps) * k + (0.5 - eps) * xo * k * xo;
  LabeledOperator wb(lay, biased);
  CHECK(project_ordered(wb, {"A_O"}, {"B_I"}).distance(wb) > 1e-3);
}

TEST_CASE("psd_check") {
  SystemLayout lay = SystemLayout::single("a", 2);
  auto rep = psd_check(LabeledOperator::identity(lay));
  CHECK(rep.psd);
  CHECK(rep.lambda_min == doctest::Approx(1.0));

  auto repz = psd_check(LabeledOperator(lay, canonical_gate(Gate::PauliZ)));
  CHECK_FALSE(repz.psd);
  CHECK(repz.lambda_min == doctest::Approx(-1.0));

  Mat nonherm(2, 2);
  nonherm << 0, 1, 0, 0;
  CHECK_THROWS(psd_check(LabeledOperator(lay, nonherm)));

  // S = 1 - 2 W_222 has PSD partial transpose on A_I
  auto w = w_222();
  Mat s = Mat::Identity(8, 8) - 2.0 * w.op.entries();
  auto spt = partial_transpose(LabeledOperator(w.op.layout(), s), {"A_I"});
  CHECK(psd_check(spt, 1e-9).psd);
}

TEST_CASE("link product commutes up to permutation") {
  std::mt19937_64 rng(43);
  SystemLayout lx({{"a", 2}, {"s", 2}});
  SystemLayout ly({{"s", 2}, {"c", 3}});
  auto x = random_op(lx, rng);
  auto y = random_op(ly, rng);
  auto xy = link_product(x, y);
  auto yx = link_product(y, x);
  CHECK(permute_subsystems(yx, xy.layout().labels()).distance(xy) < 1e-13);
  // shared-dimension mismatch is rejected
  auto bad = LabeledOperator::identity(SystemLayout({{"s", 3}, {"d", 2}}));
  CHECK_THROWS(link_product(x, bad));
}
