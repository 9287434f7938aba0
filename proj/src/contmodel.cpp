#include "sepdist/contmodel.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "sepdist/matcore.hpp"

namespace sepdist::contmodel {

namespace {

using matcore::kron;
using matcore::NormKind;

constexpr double kPi = std::numbers::pi;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw BadEpsilonError("epsilon must lie in (0, 1)");
  }
}

CVec qubit_plus() {
  CVec v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

CVec qubit_minus() {
  CVec v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return v;
}

CMat pair_projector(const CVec& first, const CVec& second) {
  const CVec v = kron(first, second);
  return v * v.adjoint();
}

// Cuts of the (a, b, c) system, c last.
const qstate::Bipartition& cut_a() {
  static const auto cut = qstate::Bipartition::of({0}, 3);
  return cut;
}
const qstate::Bipartition& cut_b() {
  static const auto cut = qstate::Bipartition::of({1}, 3);
  return cut;
}
const qstate::Bipartition& cut_c() {
  static const auto cut = qstate::Bipartition::of({2}, 3);
  return cut;
}

int thread_cap() {
  if (const char* env = std::getenv("SEPDIST_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Evaluates fn(i) for i in [0, count) on up to thread_cap() threads. Each
// index writes only its own slot, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(thread_cap(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

CMat lowering_op() {
  CMat l = CMat::Zero(3, 3);
  l(0, 1) = 1.0;
  l(1, 2) = std::sqrt(2.0);
  return l;
}

CMat number_op() { return lowering_op().adjoint() * lowering_op(); }

CMat coupling_op() { return lowering_op() + lowering_op().adjoint(); }

CMat build_hamiltonian(double epsilon) {
  check_epsilon(epsilon);
  const CMat i2 = CMat::Identity(2, 2);
  const CMat sx = matcore::pauli_x();
  return matcore::kron3(i2, i2, number_op()) +
         (epsilon / 2.0) * (matcore::kron3(sx, i2, coupling_op()) +
                            matcore::kron3(i2, sx, coupling_op()));
}

CMat split_hamiltonian_a(double epsilon) {
  const CMat i2 = CMat::Identity(2, 2);
  return 0.5 * matcore::kron3(i2, i2, number_op()) +
         (epsilon / 2.0) * matcore::kron3(matcore::pauli_x(), i2, coupling_op());
}

CMat split_hamiltonian_b(double epsilon) {
  const CMat i2 = CMat::Identity(2, 2);
  return 0.5 * matcore::kron3(i2, i2, number_op()) +
         (epsilon / 2.0) * matcore::kron3(i2, matcore::pauli_x(), coupling_op());
}

SubspaceDecomposition subspace_decomposition(double epsilon) {
  check_epsilon(epsilon);
  SubspaceDecomposition dec;
  dec.h_plus = number_op() + epsilon * coupling_op();
  dec.h_minus = number_op() - epsilon * coupling_op();
  dec.h_zero = number_op();
  const CVec p = qubit_plus(), m = qubit_minus();
  dec.proj_pp = pair_projector(p, p);
  dec.proj_mm = pair_projector(m, m);
  dec.proj_pm = pair_projector(p, m);
  dec.proj_mp = pair_projector(m, p);
  return dec;
}

CMat reassemble(const SubspaceDecomposition& dec) {
  return kron(dec.proj_pp, dec.h_plus) + kron(dec.proj_mm, dec.h_minus) +
         kron(dec.proj_pm + dec.proj_mp, dec.h_zero);
}

PerturbationData perturbative_eigensystem(double epsilon, Sign sign) {
  check_epsilon(epsilon);
  const double lambda = (sign == Sign::plus) ? epsilon : -epsilon;
  const Eigen::Matrix3d v = coupling_op().real();
  const Eigen::Vector3d e0(0.0, 1.0, 2.0);
  constexpr int kOrder = 3;

  Eigen::Matrix3d x = Eigen::Matrix3d::Zero();
  for (int n = 0; n < 3; ++n) {
    // Rayleigh-Schrodinger recursion with intermediate normalization: the
    // unperturbed component of every correction vanishes.
    std::array<Eigen::Vector3d, kOrder + 1> corr;
    corr[0] = Eigen::Vector3d::Zero();
    corr[0][n] = 1.0;
    std::array<double, kOrder + 1> energy{};
    energy[0] = e0[n];
    for (int k = 1; k <= kOrder; ++k) {
      const Eigen::Vector3d vx = v * corr[k - 1];
      energy[k] = vx[n];
      Eigen::Vector3d next = Eigen::Vector3d::Zero();
      for (int m = 0; m < 3; ++m) {
        if (m == n) continue;
        double s = vx[m];
        for (int j = 1; j < k; ++j) s -= energy[j] * corr[k - j][m];
        next[m] = s / (e0[n] - e0[m]);
      }
      corr[k] = next;
    }
    Eigen::Vector3d col = Eigen::Vector3d::Zero();
    double p = 1.0;
    for (int k = 0; k <= kOrder; ++k) {
      col += p * corr[k];
      p *= lambda;
    }
    x.col(n) = col;
  }

  PerturbationData data;
  data.d = Eigen::Vector3d(-epsilon * epsilon, 1.0 - epsilon * epsilon,
                           2.0 + 2.0 * epsilon * epsilon);
  data.x = x.cast<Complex>();
  data.delta = matcore::vandermonde_det(data.d);
  data.sign = sign;
  return data;
}

CMat u_eff(double epsilon, double t) {
  check_epsilon(epsilon);
  const PerturbationData pert = perturbative_eigensystem(epsilon, Sign::plus);
  CMat phase_d = CMat::Zero(3, 3);
  CMat phase_0 = CMat::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    phase_d(k, k) = std::exp(Complex(0.0, -pert.d[k] * t));
    phase_0(k, k) = std::exp(Complex(0.0, -static_cast<double>(k) * t));
  }
  const SubspaceDecomposition dec = subspace_decomposition(epsilon);
  return kron(dec.proj_pp + dec.proj_mm, phase_d) + kron(dec.proj_pm + dec.proj_mp, phase_0);
}

namespace {
CMat diag_phase(const Eigen::Vector3d& d, double t) {
  CMat m = CMat::Zero(3, 3);
  for (int k = 0; k < 3; ++k) m(k, k) = std::exp(Complex(0.0, -d[k] * t));
  return m;
}
}  // namespace

double bound_n1(double epsilon, double t, Sign sign) {
  if (t < 0.0) throw Error("bound_n1: t must be >= 0");
  const PerturbationData pert = perturbative_eigensystem(epsilon, sign);
  const CMat h = (sign == Sign::plus) ? subspace_decomposition(epsilon).h_plus
                                      : subspace_decomposition(epsilon).h_minus;
  const CMat residual = h * pert.x - pert.x * pert.d.cast<Complex>().asDiagonal().toDenseMatrix();
  const CMat xinv = pert.x.inverse();
  const double nxi = matcore::norm(xinv, NormKind::spectral);
  const double nx = matcore::norm(pert.x, NormKind::spectral);
  return nxi * nxi * nx * matcore::norm(residual, NormKind::spectral) * t;
}

double bound_n2(double epsilon, Sign sign) {
  const PerturbationData pert = perturbative_eigensystem(epsilon, sign);
  const CMat d_mat = pert.d.cast<Complex>().asDiagonal().toDenseMatrix();
  const CMat d2_mat = d_mat * d_mat;
  const CMat xinv = pert.x.inverse();
  const double d1 = pert.d[0], d3 = pert.d[2];
  return matcore::norm(xinv, NormKind::spectral) * (2.0 / std::abs(pert.delta)) *
         ((d3 * d3 - d1 * d1) *
              matcore::norm(pert.x * d_mat - d_mat * pert.x, NormKind::spectral) +
          (d3 - d1) * matcore::norm(pert.x * d2_mat - d2_mat * pert.x, NormKind::spectral));
}

qstate::DensityMatrix initial_state(double alpha) {
  if (alpha < 0.0) throw BadAlphaError("initial_state: alpha must be >= 0");
  CMat qubit = CMat::Zero(2, 2);
  qubit(0, 0) = 1.0;
  qubit += (alpha / 2.0) * CMat::Identity(2, 2);
  qubit /= (1.0 + alpha);
  const CMat mediator = CMat::Identity(3, 3) / 3.0;
  return qstate::DensityMatrix(matcore::kron3(qubit, qubit, mediator), model_dims());
}

EvolveMode EvolveMode::trotter(int n) {
  if (n < 1) throw BadModeError("trotter mode: step count must be >= 1");
  return {Kind::trotter, n};
}

CMat evolution_operator(double epsilon, double t, const EvolveMode& mode) {
  switch (mode.kind) {
    case EvolveMode::Kind::exact:
      return matcore::expm_i(build_hamiltonian(epsilon), t);
    case EvolveMode::Kind::effective:
      return u_eff(epsilon, t);
    case EvolveMode::Kind::trotter: {
      if (mode.trotter_steps < 1) throw BadModeError("trotter mode: step count must be >= 1");
      const double dt = t / mode.trotter_steps;
      const CMat ua = matcore::expm_i(split_hamiltonian_a(epsilon), dt);
      const CMat ub = matcore::expm_i(split_hamiltonian_b(epsilon), dt);
      const CMat step = ua * ub;
      CMat u = CMat::Identity(12, 12);
      for (int k = 0; k < mode.trotter_steps; ++k) u = step * u;
      return u;
    }
  }
  throw BadModeError("evolve: unknown mode");
}

qstate::DensityMatrix evolve(const qstate::DensityMatrix& rho, double epsilon, double t,
                             const EvolveMode& mode) {
  if (rho.dims != model_dims()) {
    throw DimMismatchError("evolve: state dims must be [2, 2, 3]");
  }
  const CMat u = evolution_operator(epsilon, t, mode);
  CMat out = u * rho.mat * u.adjoint();
  out = 0.5 * (out + out.adjoint());
  return qstate::DensityMatrix(std::move(out), rho.dims);
}

double EvolutionTrace::max_neg_c_ab() const {
  double m = 0.0;
  for (double x : neg_c_ab) m = std::max(m, x);
  return m;
}

double EvolutionTrace::max_neg_ab_reduced() const {
  double m = 0.0;
  for (double x : neg_ab_reduced) m = std::max(m, x);
  return m;
}

EvolutionTrace run_trace(double epsilon, double alpha, double t_max, int steps,
                         const EvolveMode& mode) {
  if (steps < 2) throw Error("run_trace: steps must be >= 2");
  const qstate::DensityMatrix rho0 = initial_state(alpha);
  const qstate::Bipartition cut_ab = qstate::Bipartition::of({0}, 2);

  EvolutionTrace trace;
  trace.mode = mode;
  trace.min_pt_eig_c_ab = 1.0;
  trace.times.resize(steps);
  trace.neg_c_ab.resize(steps);
  trace.neg_a_bc.resize(steps);
  trace.neg_b_ac.resize(steps);
  trace.neg_ab_reduced.resize(steps);

  // Exact mode reuses one eigendecomposition for every grid time.
  matcore::HermitianEig eig;
  if (mode.kind == EvolveMode::Kind::exact) {
    eig = matcore::hermitian_eig(build_hamiltonian(epsilon));
  }

  for (int i = 0; i < steps; ++i) {
    const double t = t_max * static_cast<double>(i) / (steps - 1);
    CMat u;
    if (mode.kind == EvolveMode::Kind::exact) {
      CVec phases(12);
      for (int k = 0; k < 12; ++k) phases[k] = std::exp(Complex(0.0, -eig.evals[k] * t));
      u = eig.evecs * phases.asDiagonal() * eig.evecs.adjoint();
    } else {
      u = evolution_operator(epsilon, t, mode);
    }
    CMat evolved = u * rho0.mat * u.adjoint();
    evolved = 0.5 * (evolved + evolved.adjoint());
    const qstate::DensityMatrix rho(std::move(evolved), model_dims());
    trace.times[i] = t;
    trace.neg_c_ab[i] = qstate::negativity(rho, cut_c());
    trace.neg_a_bc[i] = qstate::negativity(rho, cut_a());
    trace.neg_b_ac[i] = qstate::negativity(rho, cut_b());
    trace.neg_ab_reduced[i] = qstate::negativity(qstate::partial_trace(rho, {0, 1}), cut_ab);
    trace.min_pt_eig_c_ab =
        std::min(trace.min_pt_eig_c_ab, qstate::min_pt_eigenvalue(rho, cut_c()));
  }
  return trace;
}

BounceTrace bounce_simulation(double epsilon, double alpha, double t_total, int n_steps) {
  if (n_steps < 1) throw Error("bounce_simulation: n_steps must be >= 1");
  const double dt = t_total / n_steps;
  const CMat ua = matcore::expm_i(split_hamiltonian_a(epsilon), dt);
  const CMat ub = matcore::expm_i(split_hamiltonian_b(epsilon), dt);
  const qstate::Bipartition cut_ab = qstate::Bipartition::of({0}, 2);

  BounceTrace trace;
  trace.times.reserve(2 * n_steps);
  trace.neg_c_ab.reserve(2 * n_steps);
  trace.neg_ab.reserve(n_steps);
  CMat state = initial_state(alpha).mat;
  for (int k = 0; k < n_steps; ++k) {
    for (int half = 0; half < 2; ++half) {
      const CMat& u = (half == 0) ? ua : ub;
      state = u * state * u.adjoint();
      state = 0.5 * (state + state.adjoint());
      const qstate::DensityMatrix rho(state, model_dims());
      const double neg = qstate::negativity(rho, cut_c());
      trace.times.push_back((k + 0.5 * (half + 1)) * dt);
      trace.neg_c_ab.push_back(neg);
      trace.max_neg_c_ab = std::max(trace.max_neg_c_ab, neg);
      if (half == 1) {
        const double nab =
            qstate::negativity(qstate::partial_trace(rho, {0, 1}), cut_ab);
        trace.neg_ab.push_back(nab);
        trace.max_neg_ab = std::max(trace.max_neg_ab, nab);
      }
    }
  }
  return trace;
}

double analytic_budget(double epsilon, double alpha, double t_max) {
  const double n_plus = bound_n1(epsilon, t_max, Sign::plus) + bound_n2(epsilon, Sign::plus);
  const double n_minus = bound_n1(epsilon, t_max, Sign::minus) + bound_n2(epsilon, Sign::minus);
  const double rho_norm =
      matcore::norm(initial_state(alpha).mat, matcore::NormKind::frobenius);
  return 2.0 * std::max(n_plus, n_minus) * rho_norm;
}

bool analytic_feasible(double epsilon, double alpha, double t_max, int steps,
                       double* budget_out) {
  const double budget = analytic_budget(epsilon, alpha, t_max);
  if (budget_out) *budget_out = budget;

  // initial_state(alpha) = q * (I/12) + (1-q) * (separable remainder), and the
  // remainder stays classical on the mediator under the effective evolution.
  // If the deviation fits inside q times the separable ball, the true state
  // stays separable across every cut's worth of the mediator.
  const double q = std::pow(alpha / (1.0 + alpha), 2.0);
  const double ball_radius = 1.0 / std::sqrt(12.0 * 11.0);
  if (budget > q * ball_radius) return false;

  // The (a,b) entanglement of the effective trajectory must survive the
  // worst-case negativity shift: |dN| <= (1/2)||dPT||_1 <= ||d rho_ab||_F
  // and ||Tr_c d||_F <= sqrt(3) ||d||_F.
  const EvolutionTrace eff = run_trace(epsilon, alpha, t_max, steps, EvolveMode::effective());
  return eff.max_neg_ab_reduced() > std::sqrt(3.0) * budget;
}

FeasibilityTable sweep(const std::vector<double>& epsilon_grid,
                       const std::vector<double>& alpha_grid, double t_max_factor, int steps) {
  if (epsilon_grid.empty() || alpha_grid.empty()) {
    throw Error("sweep: grids must be nonempty");
  }
  FeasibilityTable table;
  table.t_max_factor = t_max_factor;
  table.steps = steps;
  const int n_rows = static_cast<int>(epsilon_grid.size() * alpha_grid.size());
  table.rows.resize(n_rows);

  parallel_for(n_rows, [&](int idx) {
    const double epsilon = epsilon_grid[idx / alpha_grid.size()];
    const double alpha = alpha_grid[idx % alpha_grid.size()];
    const double t_max = t_max_factor * 2.0 * kPi / (epsilon * epsilon);

    FeasibilityRow row;
    row.epsilon = epsilon;
    row.alpha = alpha;
    const EvolutionTrace sim = run_trace(epsilon, alpha, t_max, steps, EvolveMode::exact());
    row.max_neg_c_ab = sim.max_neg_c_ab();
    row.max_neg_ab = sim.max_neg_ab_reduced();
    row.min_pt_eig_c_ab = sim.min_pt_eig_c_ab;
    row.ancilla_separable_all_t = row.max_neg_c_ab <= kAncillaSeparableTol;
    row.ab_entangled = row.max_neg_ab >= kAbEntangledTol;
    row.sim_feasible = row.ancilla_separable_all_t && row.ab_entangled;
    row.analytic_feasible =
        analytic_feasible(epsilon, alpha, t_max, steps, &row.analytic_budget);
    table.rows[idx] = row;
  });
  return table;
}

Complex pure_firstorder_amplitude(const CMat& h_ac, const CMat& h_bc, const CVec& a,
                                  const CVec& b, const CVec& c, const CVec& a_perp,
                                  const CVec& b_perp) {
  const int da = static_cast<int>(a.size());
  const int db = static_cast<int>(b.size());
  const int dc = static_cast<int>(c.size());
  if (h_ac.rows() != da * dc || h_bc.rows() != db * dc) {
    throw DimMismatchError("pure_firstorder_amplitude: operator sizes do not match states");
  }
  if (std::abs(a_perp.dot(a)) > 1e-12 || std::abs(b_perp.dot(b)) > 1e-12) {
    throw NotOrthogonalError("pure_firstorder_amplitude: perp states must be orthogonal");
  }
  const Dims dims{da, db, dc};
  const CMat h_total = qstate::embed_operator(h_ac, {0, 2}, dims) +
                       qstate::embed_operator(h_bc, {1, 2}, dims);
  const CVec psi = matcore::kron(matcore::kron(a, b), c);
  const CVec h_psi = h_total * psi;

  Complex best = 0.0;
  for (int j = 0; j < dc; ++j) {
    CVec cj = CVec::Zero(dc);
    cj[j] = 1.0;
    const CVec bra = matcore::kron(matcore::kron(a_perp, b_perp), cj);
    const Complex amp = bra.dot(h_psi);
    if (std::abs(amp) > std::abs(best)) best = amp;
  }
  return best;
}

}  // namespace sepdist::contmodel
