#pragma once

#include <vector>

#include "sepdist/qstate.hpp"
#include "sepdist/types.hpp"

// The continuous-interaction model: two qubits a, b coupled to a three-level
// mediator c through H = 1 ⊗ n_c + (eps/2)(sigma_x^a + sigma_x^b) ⊗ (L + L†),
// written in the global (a, b, c) ordering with the mediator last. Includes
// the invariant-subspace decomposition, the perturbative effective evolution
// with explicit error bounds, exact/Trotter propagation, and the (eps, alpha)
// feasibility sweep.
namespace sepdist::contmodel {

inline const Dims& model_dims() {
  static const Dims dims{2, 2, 3};
  return dims;
}

/// Truncated lowering operator |0><1| + sqrt(2)|1><2|.
CMat lowering_op();
/// Number operator diag(0, 1, 2) of the mediator.
CMat number_op();
/// L + L†, the coupling quadrature.
CMat coupling_op();

/// Full 12x12 Hamiltonian. Requires 0 < epsilon < 1.
CMat build_hamiltonian(double epsilon);

struct SubspaceDecomposition {
  CMat h_plus, h_minus, h_zero;               // 3x3 mediator blocks
  CMat proj_pp, proj_mm, proj_pm, proj_mp;    // 4x4 projectors on (a,b)
};

/// Invariant-subspace form: H = P++ ⊗ H+ + P-- ⊗ H- + (P+- + P-+) ⊗ H0,
/// with H± = n_c ± eps (L + L†) and the projectors built from |±>.
SubspaceDecomposition subspace_decomposition(double epsilon);
CMat reassemble(const SubspaceDecomposition& dec);

enum class Sign { plus, minus };

struct PerturbationData {
  Eigen::Vector3d d;  // (-eps^2, 1-eps^2, 2+2eps^2)
  CMat x;             // eigenvector matrix of H± to third order
  double delta = 0.0; // Vandermonde determinant of d
  Sign sign = Sign::plus;
};

/// Rayleigh-Schrodinger series for H0 ± eps (L + L†), truncated at order
/// eps^3 (nondegenerate; the unperturbed levels 0, 1, 2 are distinct).
PerturbationData perturbative_eigensystem(double epsilon, Sign sign);

/// Leading-order evolution: block-diagonal, with e^{-iDt} on the ++ and --
/// sectors and e^{-i n_c t} on the mixed sectors; diagonal in the
/// |±±> ⊗ |0,1,2> basis.
CMat u_eff(double epsilon, double t);

/// ||e^{-iH±t} - X e^{-iDt} X^{-1}|| <= ||X^{-1}||^2 ||X|| ||H±X - XD|| t
/// (spectral norms); the eigenvalue-perturbation part of the evolution error.
double bound_n1(double epsilon, double t, Sign sign);

/// ||X e^{-iDt} X^{-1} - e^{-iDt}|| <=
///   ||X^{-1}|| (2/|Delta|) ((d3^2-d1^2)||XD-DX|| + (d3-d1)||XD^2-D^2X||),
/// time-independent; the eigenvector-perturbation part.
double bound_n2(double epsilon, Sign sign);

/// (|0><0| + alpha/2)⊗(|0><0| + alpha/2)⊗(1/3) / (1+alpha)^2: fully product,
/// classically uncorrelated, mediator maximally mixed.
qstate::DensityMatrix initial_state(double alpha);

struct EvolveMode {
  enum class Kind { exact, effective, trotter };
  Kind kind = Kind::exact;
  int trotter_steps = 0;

  static EvolveMode exact() { return {Kind::exact, 0}; }
  static EvolveMode effective() { return {Kind::effective, 0}; }
  static EvolveMode trotter(int n);
};

/// The half Hamiltonians of the symmetric Trotter split: each carries half of
/// the mediator term plus one qubit's coupling.
CMat split_hamiltonian_a(double epsilon);
CMat split_hamiltonian_b(double epsilon);

CMat evolution_operator(double epsilon, double t, const EvolveMode& mode);
qstate::DensityMatrix evolve(const qstate::DensityMatrix& rho, double epsilon, double t,
                             const EvolveMode& mode);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> neg_c_ab, neg_a_bc, neg_b_ac, neg_ab_reduced;
  EvolveMode mode;
  double min_pt_eig_c_ab = 0.0;  // robustness margin of the mediator cut

  double max_neg_c_ab() const;
  double max_neg_ab_reduced() const;
};

/// Evolves initial_state(alpha) across a uniform time grid, recording the
/// negativities of all three cuts and of the reduced (a,b) state.
EvolutionTrace run_trace(double epsilon, double alpha, double t_max, int steps,
                         const EvolveMode& mode);

struct BounceTrace {
  std::vector<double> times;      // nominal time after each half step
  std::vector<double> neg_c_ab;   // mediator cut after each half step
  std::vector<double> neg_ab;     // reduced (a,b) after each full step
  double max_neg_c_ab = 0.0;
  double max_neg_ab = 0.0;
};

/// Discretized send-the-mediator protocol: alternately applies the two split
/// evolutions for t_total/n each, checking the mediator cut after every half
/// step (each "bounce").
BounceTrace bounce_simulation(double epsilon, double alpha, double t_total, int n_steps);

struct FeasibilityRow {
  double epsilon = 0.0;
  double alpha = 0.0;
  double max_neg_c_ab = 0.0;
  double max_neg_ab = 0.0;
  double min_pt_eig_c_ab = 0.0;
  bool ancilla_separable_all_t = false;  // simulated, <= 1e-10 at every time
  bool ab_entangled = false;             // simulated, max >= 1e-6
  bool sim_feasible = false;
  double analytic_budget = 0.0;
  bool analytic_feasible = false;
};

struct FeasibilityTable {
  std::vector<FeasibilityRow> rows;
  double t_max_factor = 1.0;
  int steps = 0;
};

inline constexpr double kAncillaSeparableTol = 1e-10;
inline constexpr double kAbEntangledTol = 1e-6;

/// Exact-mode simulation flags plus the analytic feasibility chain per grid
/// point, with t_max = t_max_factor * 2*pi/eps^2. Grid points are
/// independent; evaluation may be parallel (capped by SEPDIST_THREADS) and
/// the result is order-deterministic.
FeasibilityTable sweep(const std::vector<double>& epsilon_grid,
                       const std::vector<double>& alpha_grid, double t_max_factor, int steps);

/// Frobenius budget of the analytic chain: an upper bound on the distance
/// between the true and effective evolved states over [0, t_max].
double analytic_budget(double epsilon, double alpha, double t_max);

/// Separable-ball chain verdict: the maximally mixed weight hidden in
/// initial_state(alpha) must absorb the budget, and the effective (a,b)
/// entanglement must exceed the budget's worst-case effect on negativity.
bool analytic_feasible(double epsilon, double alpha, double t_max, int steps,
                       double* budget_out = nullptr);

/// First-order amplitude for a pure product state to leave the mediator cut
/// separable: <a_perp, b_perp, c'|(H_ac ⊗ 1_b + 1_a ⊗ H_bc)|a, b, c>,
/// maximized over the basis states c'. Vanishes identically when
/// <a_perp|a> = <b_perp|b> = 0.
Complex pure_firstorder_amplitude(const CMat& h_ac, const CMat& h_bc, const CVec& a,
                                  const CVec& b, const CVec& c, const CVec& a_perp,
                                  const CVec& b_perp);

}  // namespace sepdist::contmodel
