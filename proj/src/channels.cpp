#include "sepdist/channels.hpp"

#include <cmath>

#include "sepdist/matcore.hpp"

namespace sepdist::channels {

namespace {

// |s><t| on three qubits, s and t given as bit strings like "010".
CMat ketbra3(const char* s, const char* t) {
  auto index = [](const char* bits) {
    int idx = 0;
    for (int k = 0; k < 3; ++k) idx = idx * 2 + (bits[k] - '0');
    return idx;
  };
  CMat m = CMat::Zero(8, 8);
  m(index(s), index(t)) = 1.0;
  return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

bool is_trace_preserving(const KrausMap& map, double tol) {
  const int d = map.total();
  CMat sum = CMat::Zero(d, d);
  for (const CMat& k : map.kraus) sum += k.adjoint() * k;
  return matcore::norm(sum - CMat::Identity(d, d), matcore::NormKind::spectral) <= tol;
}

qstate::DensityMatrix apply(const KrausMap& map, const qstate::DensityMatrix& rho) {
  if (map.total() != rho.total()) {
    throw DimMismatchError("apply: map and state dimensions differ");
  }
  const int d = map.total();
  CMat out = CMat::Zero(d, d);
  for (const CMat& k : map.kraus) out += k * rho.mat * k.adjoint();
  out = 0.5 * (out + out.adjoint());
  return qstate::DensityMatrix(std::move(out), rho.dims);
}

KrausMap compose(const KrausMap& second, const KrausMap& first) {
  if (second.total() != first.total()) {
    throw DimMismatchError("compose: map dimensions differ");
  }
  KrausMap out;
  out.dims = first.dims;
  out.kraus.reserve(second.kraus.size() * first.kraus.size());
  for (const CMat& b : second.kraus)
    for (const CMat& a : first.kraus) out.kraus.push_back(b * a);
  return out;
}

qstate::DensityMatrix choi(const KrausMap& map) {
  const int d = map.total();
  CMat c = CMat::Zero(d * d, d * d);
  for (const CMat& k : map.kraus) {
    // (K ⊗ 1)|Omega> is the row-major flattening of K, up to 1/sqrt(d).
    CVec v(d * d);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) v[r * d + s] = k(r, s);
    c += v * v.adjoint();
  }
  c /= static_cast<double>(d);
  c = 0.5 * (c + c.adjoint());
  return qstate::DensityMatrix(std::move(c), Dims{d, d});
}

KrausMap identity_map(Dims dims) {
  const int d = total_dim(dims);
  return KrausMap{{CMat::Identity(d, d)}, std::move(dims)};
}

KrausMap stage_one_map() {
  KrausMap m;
  m.dims = {2, 2, 2};
  m.kraus = {
      ketbra3("000", "000") + ketbra3("111", "111"),
      ketbra3("001", "001"),
      ketbra3("010", "010"),
      ketbra3("101", "101"),
      ketbra3("110", "110"),
      ketbra3("000", "011"),
      ketbra3("111", "100"),
  };
  return m;
}

KrausMap stage_two_map() {
  // Conjugate every Kraus operator of stage one by the a<->b swap.
  CMat swap_ab = CMat::Zero(8, 8);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) swap_ab((b * 2 + a) * 2 + c, (a * 2 + b) * 2 + c) = 1.0;
  KrausMap m = stage_one_map();
  for (CMat& k : m.kraus) k = swap_ab * k * swap_ab.adjoint();
  return m;
}

KrausMap composed_map() {
  KrausMap m;
  m.dims = {2, 2, 2};
  m.kraus = {
      ketbra3("000", "000") + ketbra3("111", "111"),
      ketbra3("001", "001"),
      ketbra3("111", "010"),
      ketbra3("000", "011"),
      ketbra3("111", "100"),
      ketbra3("000", "101"),
      ketbra3("110", "110"),
  };
  return m;
}

AuditReport audit_nonentangling(const KrausMap& map, const qstate::Bipartition& part,
                                int samples, std::uint64_t seed) {
  if (samples < 1) throw Error("audit_nonentangling: samples must be >= 1");
  AuditReport report;
  report.partition = part;
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    // Per-sample derived seed keeps the report independent of evaluation
    // order; mixtures of 1..8 pure product states cover boundary and
    // interior of the separable set.
    const std::uint64_t sample_seed = splitmix64(seed ^ static_cast<std::uint64_t>(s));
    const int terms = 1 + static_cast<int>(sample_seed % 8);
    const qstate::DensityMatrix input =
        qstate::random_separable_state(map.dims, part, terms, sample_seed);
    const double neg = qstate::negativity(apply(map, input), part);
    if (neg > report.max_output_negativity) {
      report.max_output_negativity = neg;
      if (neg > 1e-8) {
        report.verdict = AuditVerdict::entangling_witness_found;
        report.witness_state = input;
      }
    }
  }
  return report;
}

EntangleDemo demo_entangle_plus() {
  const Dims dims{2, 2, 2};
  CVec plus(2), minus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  CVec ppp(8);
  for (int k = 0; k < 8; ++k) ppp[k] = 1.0 / std::sqrt(8.0);

  const KrausMap e = compose(stage_two_map(), stage_one_map());
  const qstate::DensityMatrix out = apply(e, qstate::DensityMatrix::pure(ppp, dims));

  auto branch = [&](const CVec& basis_state) {
    // Partial inner product <v|_c out |v>_c on the last qubit.
    CMat isometry = matcore::kron(CMat::Identity(4, 4), basis_state);
    CMat m = isometry.adjoint() * out.mat * isometry;
    const double p = m.trace().real();
    m /= p;
    m = 0.5 * (m + m.adjoint());
    return std::pair<double, qstate::DensityMatrix>(
        p, qstate::DensityMatrix(std::move(m), Dims{2, 2}));
  };

  auto [pp, rho_p] = branch(plus);
  auto [pm, rho_m] = branch(minus);
  const qstate::Bipartition cut = qstate::Bipartition::of({0}, 2);
  EntangleDemo demo{pp,
                    pm,
                    rho_p,
                    rho_m,
                    qstate::negativity(rho_p, cut),
                    qstate::negativity(rho_m, cut)};
  return demo;
}

}  // namespace sepdist::channels
