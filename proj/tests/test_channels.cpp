#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sepdist/channels.hpp"
#include "sepdist/matcore.hpp"
#include "sepdist/protocol.hpp"
#include "sepdist/qstate.hpp"
#include "testutil.hpp"

using namespace sepdist;
using namespace sepdist::channels;
using matcore::kron;
using testutil::max_abs_diff;

namespace {

// Random trace-preserving map on dims with the given number of Kraus
// operators, via K_k = G_k S^{-1/2} with S = sum G†G.
KrausMap random_tp_map(const Dims& dims, int n_kraus, std::mt19937_64& rng) {
  const int d = total_dim(dims);
  std::vector<CMat> gs;
  CMat s = CMat::Zero(d, d);
  for (int k = 0; k < n_kraus; ++k) {
    gs.push_back(testutil::random_matrix(d, rng));
    s += gs.back().adjoint() * gs.back();
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(s);
  const CMat inv_sqrt = solver.eigenvectors() *
                        solver.eigenvalues().cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                        solver.eigenvectors().adjoint();
  KrausMap map;
  map.dims = dims;
  for (CMat& g : gs) map.kraus.push_back(g * inv_sqrt);
  return map;
}

}  // namespace

TEST_CASE("identity map leaves states unchanged and has the Bell Choi state") {
  std::mt19937_64 rng(1);
  const Dims dims{2, 2};
  const KrausMap id = identity_map(dims);
  const qstate::DensityMatrix rho(testutil::random_density(4, rng), dims);
  CHECK(max_abs_diff(apply(id, rho).mat, rho.mat) < 1e-14);

  const KrausMap id1 = identity_map({2});
  const CVec phi = protocol::bell_phi_plus();
  CHECK(max_abs_diff(choi(id1).mat, phi * phi.adjoint()) < 1e-14);
}

TEST_CASE("completely depolarizing channel has the maximally mixed Choi state") {
  // Kraus family |i><j|/sqrt(d) sends everything to I/d.
  auto depolarizing = [](const Dims& dims) {
    const int d = total_dim(dims);
    KrausMap map;
    map.dims = dims;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        CMat k = CMat::Zero(d, d);
        k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
        map.kraus.push_back(k);
      }
    return map;
  };

  const KrausMap depol1 = depolarizing({2});
  CHECK(is_trace_preserving(depol1));
  CHECK(max_abs_diff(choi(depol1).mat, CMat::Identity(4, 4) / 4.0) < 1e-14);

  const KrausMap depol2 = depolarizing({2, 2});
  const AuditReport report =
      audit_nonentangling(depol2, qstate::Bipartition::of({0}, 2), 50, 7);
  CHECK(report.verdict == AuditVerdict::no_violation_found);
  CHECK(report.max_output_negativity == 0.0);
}

TEST_CASE("both stage maps are trace preserving") {
  CHECK(is_trace_preserving(stage_one_map()));
  CHECK(is_trace_preserving(stage_two_map()));
  CHECK(is_trace_preserving(composed_map()));
  CHECK(is_trace_preserving(compose(stage_two_map(), stage_one_map())));

  std::mt19937_64 rng(3);
  const KrausMap e1 = stage_one_map();
  for (int rep = 0; rep < 100; ++rep) {
    const qstate::DensityMatrix rho(testutil::random_density(8, rng), Dims{2, 2, 2});
    CHECK(apply(e1, rho).mat.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("composition equals the directly constructed seven-operator map") {
  const KrausMap composed = compose(stage_two_map(), stage_one_map());
  CHECK(composed.kraus.size() == 49);
  int nonzero = 0;
  for (const CMat& k : composed.kraus) {
    if (k.cwiseAbs().maxCoeff() > 1e-14) ++nonzero;
  }
  CHECK(nonzero == 7);
  CHECK(max_abs_diff(choi(composed).mat, choi(composed_map()).mat) < 1e-12);
}

TEST_CASE("compose with identity changes nothing, composition of TP maps is TP") {
  std::mt19937_64 rng(5);
  const KrausMap m = random_tp_map({2, 2}, 3, rng);
  CHECK(max_abs_diff(choi(compose(identity_map({2, 2}), m)).mat, choi(m).mat) < 1e-13);
  const KrausMap n = random_tp_map({2, 2}, 2, rng);
  CHECK(is_trace_preserving(compose(n, m)));
}

TEST_CASE("apply respects composition") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const KrausMap first = random_tp_map({2, 2}, 3, rng);
    const KrausMap second = random_tp_map({2, 2}, 2, rng);
    const qstate::DensityMatrix rho(testutil::random_density(4, rng), Dims{2, 2});
    CHECK(max_abs_diff(apply(compose(second, first), rho).mat,
                       apply(second, apply(first, rho)).mat) < 1e-12);
  }
}

TEST_CASE("Choi matrix is invariant under isometric remixing of the Kraus family") {
  std::mt19937_64 rng(13);
  const KrausMap m = random_tp_map({2, 2}, 3, rng);
  const CMat u = testutil::random_unitary(3, rng);
  KrausMap remixed;
  remixed.dims = m.dims;
  for (int r = 0; r < 3; ++r) {
    CMat k = CMat::Zero(4, 4);
    for (int s = 0; s < 3; ++s) k += u(r, s) * m.kraus[s];
    remixed.kraus.push_back(k);
  }
  CHECK(is_trace_preserving(remixed));
  CHECK(max_abs_diff(choi(m).mat, choi(remixed).mat) < 1e-12);
}

TEST_CASE("Choi of a TP map has a maximally mixed input marginal") {
  std::mt19937_64 rng(17);
  const KrausMap m = random_tp_map({2, 2}, 4, rng);
  const qstate::DensityMatrix c = choi(m);
  // tracing out the output side (factor 0 of the doubled space)
  const CMat marginal = qstate::partial_trace(c, {1}).mat;
  CHECK(max_abs_diff(marginal, CMat::Identity(4, 4) / 4.0) < 1e-12);
}

TEST_CASE("extraction channel application matches the protocol module") {
  const qstate::DensityMatrix tau = protocol::tau_reference();
  KrausMap padded = protocol::extraction_channel();
  padded.dims = {2, 2, 2};
  for (CMat& k : padded.kraus) k = kron(CMat::Identity(2, 2), k);
  const qstate::DensityMatrix via_channels =
      qstate::partial_trace(apply(padded, tau), {0, 1});
  CHECK(max_abs_diff(via_channels.mat, protocol::apply_extraction(tau).mat) < 1e-14);
}

TEST_CASE("audits: stage maps look non-entangling on their protected cuts") {
  const int samples = 200;
  const KrausMap e1 = stage_one_map();
  const KrausMap e2 = stage_two_map();

  for (const auto& [map, left] : {std::pair<const KrausMap*, int>{&e1, 1},
                                  {&e1, 2},
                                  {&e2, 0},
                                  {&e2, 2}}) {
    const AuditReport report =
        audit_nonentangling(*map, qstate::Bipartition::of({left}, 3), samples, 4242);
    CHECK(report.verdict == AuditVerdict::no_violation_found);
    CHECK(report.max_output_negativity <= 1e-10);
  }
}

TEST_CASE("audit finds witnesses where the composition entangles") {
  const KrausMap composed = compose(stage_two_map(), stage_one_map());

  const AuditReport protected_cut =
      audit_nonentangling(composed, qstate::Bipartition::of({2}, 3), 200, 99);
  CHECK(protected_cut.verdict == AuditVerdict::no_violation_found);

  for (int left : {0, 1}) {
    const qstate::Bipartition cut = qstate::Bipartition::of({left}, 3);
    const AuditReport report = audit_nonentangling(composed, cut, 200, 99);
    CHECK(report.verdict == AuditVerdict::entangling_witness_found);
    REQUIRE(report.witness_state.has_value());
    // the witness is separable across the cut, its image is not
    CHECK(qstate::negativity(*report.witness_state, cut) <= 1e-12);
    CHECK(qstate::negativity(apply(composed, *report.witness_state), cut) > 1e-8);
  }
}

TEST_CASE("audit reports are deterministic in the seed") {
  const KrausMap e1 = stage_one_map();
  const qstate::Bipartition cut = qstate::Bipartition::of({2}, 3);
  const AuditReport first = audit_nonentangling(e1, cut, 64, 1234);
  const AuditReport second = audit_nonentangling(e1, cut, 64, 1234);
  CHECK(first.max_output_negativity == second.max_output_negativity);
  CHECK(first.verdict == second.verdict);
}

TEST_CASE("the |+++> demonstration") {
  const EntangleDemo demo = demo_entangle_plus();
  CHECK(demo.prob_plus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(demo.prob_minus == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(demo.negativity_plus == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(demo.negativity_minus == doctest::Approx(0.125).epsilon(1e-10));

  // the (+) branch literal: phi+/4 + 3/8 |00><00| + 3/8 |11><11|
  const CVec phi = protocol::bell_phi_plus();
  CMat expected = (phi * phi.adjoint()) / 4.0;
  expected(0, 0) += 3.0 / 8.0;
  expected(3, 3) += 3.0 / 8.0;
  CHECK(max_abs_diff(demo.state_plus.mat, expected) < 1e-13);
}

TEST_CASE("dimension mismatches are rejected") {
  const KrausMap id2 = identity_map({2});
  const qstate::DensityMatrix rho = qstate::DensityMatrix::maximally_mixed({2, 2});
  CHECK_THROWS_AS(apply(id2, rho), DimMismatchError);
  CHECK_THROWS_AS(compose(id2, identity_map({2, 2})), DimMismatchError);
}
