#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sepdist/errors.hpp"
#include "sepdist/types.hpp"

// Multipartite density matrices: tensor-factor bookkeeping, partial
// trace/transpose, negativity, and separability certificates. The subsystem
// ordering convention is fixed globally: index 0 is the leftmost (most
// significant) tensor factor.
namespace sepdist::qstate {

/// A split of the subsystem indices into two disjoint, covering, nonempty
/// groups. Groups are stored sorted ascending.
struct Bipartition {
  std::vector<int> left;
  std::vector<int> right;

  /// Builds the partition {left | complement} for a system of n subsystems.
  static Bipartition of(std::vector<int> left, int n_subsystems);
  void validate(int n_subsystems) const;
};

/// Unit-trace, Hermitian, positive-semidefinite matrix together with the
/// ordered subsystem dimensions (their product must equal the matrix
/// dimension). Construction validates all three invariants to 1e-10.
struct DensityMatrix {
  CMat mat;
  Dims dims;

  DensityMatrix(CMat m, Dims d);

  int total() const { return static_cast<int>(mat.rows()); }

  static DensityMatrix pure(const CVec& psi, Dims dims);
  static DensityMatrix maximally_mixed(Dims dims);
};

struct SeparabilityVerdict {
  double negativity = 0.0;
  bool ppt = false;
  bool ball_certified = false;
};

// Eigenvalues of a partial transpose above -kNegativityCutoff count as zero;
// this is the eigensolver noise floor.
inline constexpr double kNegativityCutoff = 1e-10;

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// Transpose applied to the right-group indices of the partition only.
/// The result is Hermitian with unit trace but need not be positive.
CMat partial_transpose(const DensityMatrix& rho, const Bipartition& part);

/// Same transformation on a raw matrix (no state invariants required); this
/// is what makes the involution testable on arbitrary Hermitian inputs.
CMat partial_transpose(const CMat& mat, const Dims& dims, const Bipartition& part);

/// Sum of |negative eigenvalues| of the partial transpose across the cut;
/// equals (trace norm - 1)/2 up to the noise cutoff. Zero for all PPT states.
double negativity(const DensityMatrix& rho, const Bipartition& part);

/// Smallest eigenvalue of the partial transpose (a robustness margin:
/// positive means PPT with room to spare).
double min_pt_eigenvalue(const DensityMatrix& rho, const Bipartition& part);

/// True if ||rho - I/d||_F <= 1/sqrt(d(d-1)): every state in that ball is
/// separable across every cut. False is inconclusive.
bool ball_certified_separable(const DensityMatrix& rho, const Bipartition& part);

/// Negativity, PPT flag and ball certificate for one cut. PPT alone is
/// conclusive for separability only on 2x2 and 2x3 cuts; larger cuts need the
/// ball certificate (or an explicit decomposition) to be called separable.
SeparabilityVerdict assess_separability(const DensityMatrix& rho, const Bipartition& part,
                                        double tol = kNegativityCutoff);

/// Human-readable verdict. On cuts larger than 2x3 a bare PPT result is
/// reported as "ppt (not certified separable)".
std::string separability_label(const DensityMatrix& rho, const Bipartition& part);

/// Convex mixture of `terms` Haar-random pure product states across the cut,
/// with random weights. Deterministic for a given seed.
DensityMatrix random_separable_state(const Dims& dims, const Bipartition& part, int terms,
                                     std::uint64_t seed);

CVec haar_random_state(int dim, std::mt19937_64& rng);

/// Global state vector whose restriction to the partition's groups equals the
/// given local vectors (each in the group's ascending index order).
CVec product_state_across(const Dims& dims, const Bipartition& part, const CVec& psi_left,
                          const CVec& psi_right);

/// Operator acting as `op` on the listed subsystems (ascending order) and as
/// identity on the rest.
CMat embed_operator(const CMat& op, const std::vector<int>& positions, const Dims& dims);

}  // namespace sepdist::qstate
