#pragma once

#include <vector>

#include "sepdist/channels.hpp"
#include "sepdist/qstate.hpp"

// The discrete three-qubit protocol: a classically correlated start, Alice's
// CNOT on (a,c), Bob's CNOT on (b,c), then measurement or a deterministic
// extraction channel. The mediating qubit c stays separable from (ab) at
// every step while a and b end up entangled.
namespace sepdist::protocol {

CVec bell_phi_plus();  // (|00> + |11>)/sqrt(2)
CVec ghz_state();      // (|000> + |111>)/sqrt(2)

/// Mixture of products |Psi_k, Psi_-k, 0> (k = 0..3, phases i^k) and |i,i,1>;
/// separable across all three cuts and classically correlated only.
qstate::DensityMatrix initial_state_discrete();

/// CNOT permutation unitary on n qubits.
CMat cnot(int control, int target, int n_qubits);

/// Literal reference matrices for the two intermediate states, constructed
/// entry by entry rather than by evolution.
qstate::DensityMatrix sigma_reference();
qstate::DensityMatrix tau_reference();

struct StepNegativities {
  double a_bc = 0.0;
  double b_ac = 0.0;
  double c_ab = 0.0;
};

struct ProtocolTrace {
  qstate::DensityMatrix rho_initial;
  qstate::DensityMatrix sigma;
  qstate::DensityMatrix tau;
  qstate::DensityMatrix rho_ab;
  StepNegativities neg_initial, neg_sigma, neg_tau;
  double neg_rho_ab = 0.0;
  double prob_outcome0 = 0.0;
  double sigma_vs_reference = 0.0;  // max abs entrywise deviation
  double tau_vs_reference = 0.0;
};

/// Runs all three steps plus measurement and extraction. Throws
/// InternalCheckError if an evolved state deviates from its reference by
/// more than 1e-12 entrywise.
ProtocolTrace run_protocol();

struct MeasurementBranch {
  int outcome = 0;
  double probability = 0.0;
  qstate::DensityMatrix post_state;  // renormalized state of (a,b)
};

struct MeasurementResult {
  std::vector<MeasurementBranch> branches;
  int skipped_zero_branches = 0;
};

/// Computational-basis measurement of the last subsystem, Born rule
/// probabilities; branches with vanishing probability are skipped and
/// counted.
MeasurementResult measure_ancilla(const qstate::DensityMatrix& tau);

/// Kraus operators of the deterministic extraction channel on (b,c).
channels::KrausMap extraction_channel();

/// Applies the extraction channel (identity on a) to the tripartite state
/// and traces out c.
qstate::DensityMatrix apply_extraction(const qstate::DensityMatrix& tau);

}  // namespace sepdist::protocol
