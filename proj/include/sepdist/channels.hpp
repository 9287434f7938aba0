#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sepdist/qstate.hpp"
#include "sepdist/types.hpp"

// Completely positive maps as Kraus families: application, composition, Choi
// matrices, non-entangling audits, and the two-stage composition example on
// three qubits.
namespace sepdist::channels {

struct KrausMap {
  std::vector<CMat> kraus;
  Dims dims;

  int total() const { return total_dim(dims); }
};

/// ||sum K^dagger K - 1||_spec <= tol.
bool is_trace_preserving(const KrausMap& map, double tol = 1e-12);

qstate::DensityMatrix apply(const KrausMap& map, const qstate::DensityMatrix& rho);

/// Kraus list of second∘first: all pairwise products second_j * first_i.
KrausMap compose(const KrausMap& second, const KrausMap& first);

/// (map ⊗ id) applied to the maximally entangled state on the doubled space,
/// trace-normalized. Two Kraus families describe the same channel iff their
/// Choi matrices are equal.
qstate::DensityMatrix choi(const KrausMap& map);

KrausMap identity_map(Dims dims);

/// First stage: a TPCPM on three qubits that cannot create entanglement
/// across b|(ac) or c|(ab).
KrausMap stage_one_map();
/// Second stage: stage one with the roles of qubits a and b interchanged;
/// cannot create entanglement across a|(bc) or c|(ab).
KrausMap stage_two_map();
/// The seven-operator Kraus list of stage_two ∘ stage_one, constructed
/// directly (compose() reproduces it up to Choi equality).
KrausMap composed_map();

enum class AuditVerdict { no_violation_found, entangling_witness_found };

struct AuditReport {
  qstate::Bipartition partition;
  int samples = 0;
  double max_output_negativity = 0.0;
  AuditVerdict verdict = AuditVerdict::no_violation_found;
  std::optional<qstate::DensityMatrix> witness_state;  // the offending input
};

/// Applies the map to `samples` random separable states across the cut and
/// records the largest output negativity. Sampling cannot prove a universal
/// negative: "no violation found" is not a proof of non-entanglement.
AuditReport audit_nonentangling(const KrausMap& map, const qstate::Bipartition& part,
                                int samples, std::uint64_t seed);

struct EntangleDemo {
  double prob_plus = 0.0;
  double prob_minus = 0.0;
  qstate::DensityMatrix state_plus;
  qstate::DensityMatrix state_minus;
  double negativity_plus = 0.0;
  double negativity_minus = 0.0;
};

/// Applies the composed map to |+++> and measures c in the |+>,|-> basis;
/// both branches leave a and b entangled.
EntangleDemo demo_entangle_plus();

}  // namespace sepdist::channels
