#include "sepdist/protocol.hpp"

#include <cmath>
#include <numbers>

#include "sepdist/matcore.hpp"

namespace sepdist::protocol {

namespace {

const Dims kDims{2, 2, 2};

CVec basis3(int a, int b, int c) {
  CVec v = CVec::Zero(8);
  v[(a * 2 + b) * 2 + c] = 1.0;
  return v;
}

CMat proj(const CVec& v) { return v * v.adjoint(); }

// (|0> + e^{i k pi/2}|1>)/sqrt(2)
CVec equator_state(int k) {
  CVec v(2);
  v[0] = 1.0 / std::sqrt(2.0);
  v[1] = std::exp(Complex(0.0, k * std::numbers::pi / 2.0)) / std::sqrt(2.0);
  return v;
}

}  // namespace

CVec bell_phi_plus() {
  CVec v = CVec::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return v;
}

CVec ghz_state() {
  CVec v = CVec::Zero(8);
  v[0] = v[7] = 1.0 / std::sqrt(2.0);
  return v;
}

qstate::DensityMatrix initial_state_discrete() {
  CMat rho = CMat::Zero(8, 8);
  CVec zero(2), one(2);
  zero << 1.0, 0.0;
  one << 0.0, 1.0;
  for (int k = 0; k < 4; ++k) {
    CVec v = CVec::Zero(8);
    const CVec pa = equator_state(k);
    const CVec pb = equator_state(-k);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) v[(a * 2 + b) * 2 + 0] = pa[a] * pb[b];
    rho += proj(v) / 6.0;
  }
  rho += proj(basis3(0, 0, 1)) / 6.0;
  rho += proj(basis3(1, 1, 1)) / 6.0;
  rho = 0.5 * (rho + rho.adjoint());
  return qstate::DensityMatrix(std::move(rho), kDims);
}

CMat cnot(int control, int target, int n_qubits) {
  if (control == target || control < 0 || target < 0 || control >= n_qubits ||
      target >= n_qubits) {
    throw BadIndexError("cnot: invalid control/target");
  }
  const int d = 1 << n_qubits;
  CMat m = CMat::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    int out = b;
    const int control_bit = (b >> (n_qubits - 1 - control)) & 1;
    if (control_bit) out ^= 1 << (n_qubits - 1 - target);
    m(out, b) = 1.0;
  }
  return m;
}

qstate::DensityMatrix sigma_reference() {
  CMat rho = proj(ghz_state()) / 3.0;
  rho += proj(basis3(0, 0, 1)) / 6.0;
  rho += proj(basis3(0, 1, 0)) / 6.0;
  rho += proj(basis3(1, 0, 1)) / 6.0;
  rho += proj(basis3(1, 1, 0)) / 6.0;
  return qstate::DensityMatrix(std::move(rho), kDims);
}

qstate::DensityMatrix tau_reference() {
  CMat zero_c(2, 2), one_c(2, 2);
  zero_c << 1, 0, 0, 0;
  one_c << 0, 0, 0, 1;
  const CVec phi = bell_phi_plus();
  CMat rho = matcore::kron(phi * phi.adjoint(), zero_c) / 3.0;
  rho += matcore::kron(CMat::Identity(4, 4) / 4.0, one_c) * (2.0 / 3.0);
  return qstate::DensityMatrix(std::move(rho), kDims);
}

MeasurementResult measure_ancilla(const qstate::DensityMatrix& tau) {
  const int n = static_cast<int>(tau.dims.size());
  const int dc = tau.dims.back();
  const int dk = tau.total() / dc;
  MeasurementResult result;
  for (int outcome = 0; outcome < dc; ++outcome) {
    CVec basis_state = CVec::Zero(dc);
    basis_state[outcome] = 1.0;
    const CMat isometry = matcore::kron(CMat::Identity(dk, dk), basis_state);
    CMat m = isometry.adjoint() * tau.mat * isometry;
    const double p = m.trace().real();
    if (p < 1e-14) {
      ++result.skipped_zero_branches;
      continue;
    }
    m /= p;
    m = 0.5 * (m + m.adjoint());
    Dims kept(tau.dims.begin(), tau.dims.begin() + (n - 1));
    result.branches.push_back({outcome, p, qstate::DensityMatrix(std::move(m), kept)});
  }
  return result;
}

channels::KrausMap extraction_channel() {
  CMat p0(2, 2), p1(2, 2), raise01(2, 2);
  p0 << 1, 0, 0, 0;
  p1 << 0, 0, 0, 1;
  raise01 << 0, 1, 0, 0;  // |0><1| on b
  channels::KrausMap m;
  m.dims = {2, 2};  // (b, c)
  m.kraus = {
      matcore::kron(CMat::Identity(2, 2), p0),
      matcore::kron(p0, p1),
      matcore::kron(raise01, p1),
  };
  return m;
}

qstate::DensityMatrix apply_extraction(const qstate::DensityMatrix& tau) {
  channels::KrausMap padded = extraction_channel();
  padded.dims = {2, 2, 2};
  for (CMat& k : padded.kraus) k = matcore::kron(CMat::Identity(2, 2), k);
  const qstate::DensityMatrix mapped = channels::apply(padded, tau);
  return qstate::partial_trace(mapped, {0, 1});
}

ProtocolTrace run_protocol() {
  const qstate::Bipartition cut_a = qstate::Bipartition::of({0}, 3);
  const qstate::Bipartition cut_b = qstate::Bipartition::of({1}, 3);
  const qstate::Bipartition cut_c = qstate::Bipartition::of({2}, 3);
  auto negativities = [&](const qstate::DensityMatrix& rho) {
    return StepNegativities{qstate::negativity(rho, cut_a), qstate::negativity(rho, cut_b),
                            qstate::negativity(rho, cut_c)};
  };

  const qstate::DensityMatrix rho0 = initial_state_discrete();

  const CMat cnot_ac = cnot(0, 2, 3);
  qstate::DensityMatrix sigma(cnot_ac * rho0.mat * cnot_ac.adjoint(), kDims);
  const double sigma_dev = (sigma.mat - sigma_reference().mat).cwiseAbs().maxCoeff();
  if (sigma_dev > 1e-12) {
    throw InternalCheckError("run_protocol: evolved sigma deviates from reference by " +
                             std::to_string(sigma_dev));
  }

  const CMat cnot_bc = cnot(1, 2, 3);
  qstate::DensityMatrix tau(cnot_bc * sigma.mat * cnot_bc.adjoint(), kDims);
  const double tau_dev = (tau.mat - tau_reference().mat).cwiseAbs().maxCoeff();
  if (tau_dev > 1e-12) {
    throw InternalCheckError("run_protocol: evolved tau deviates from reference by " +
                             std::to_string(tau_dev));
  }

  const MeasurementResult measured = measure_ancilla(tau);
  double prob0 = 0.0;
  for (const auto& branch : measured.branches) {
    if (branch.outcome == 0) prob0 = branch.probability;
  }

  qstate::DensityMatrix rho_ab = apply_extraction(tau);

  ProtocolTrace trace{rho0,
                      sigma,
                      tau,
                      rho_ab,
                      negativities(rho0),
                      negativities(sigma),
                      negativities(tau),
                      qstate::negativity(rho_ab, qstate::Bipartition::of({0}, 2)),
                      prob0,
                      sigma_dev,
                      tau_dev};
  return trace;
}

}  // namespace sepdist::protocol
