#pragma once

// Shared helpers and independent oracles for the test suites. Everything here
// deliberately avoids the library's own code paths: the matrix exponential is
// a scaled Taylor series, the spectral norm comes from eigenvalues of M†M,
// partial trace/transpose use direct two-group reshapes.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sepdist/types.hpp"

namespace testutil {

using sepdist::CMat;
using sepdist::Complex;
using sepdist::CVec;
using sepdist::Dims;

inline double max_abs_diff(const CMat& a, const CMat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// exp(M) by scaling-and-squaring with a plain Taylor series.
inline CMat expm_taylor(const CMat& m) {
  const int dim = static_cast<int>(m.rows());
  int squarings = 0;
  double scale = m.cwiseAbs().maxCoeff() * dim;
  while (scale > 0.5) {
    scale /= 2.0;
    ++squarings;
  }
  const CMat scaled = m / std::pow(2.0, squarings);
  CMat term = CMat::Identity(dim, dim);
  CMat sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

// Largest singular value via the square root of the top eigenvalue of M†M.
inline double spectral_norm_ref(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

inline double trace_norm_ref(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues().sum();
}

// Negativity through the trace-norm route: (||rho^T_group||_1 - 1)/2.
inline double negativity_trace_norm_ref(const CMat& pt_matrix) {
  return 0.5 * (trace_norm_ref(pt_matrix) - 1.0);
}

// Partial trace by direct summation over the traced multi-index, written
// against a flattened digit representation.
inline CMat partial_trace_ref(const CMat& rho, const Dims& dims, const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> digits_i(n), digits_j(n);
  auto digits_of = [&](int x, std::vector<int>& out) {
    for (int k = n - 1; k >= 0; --k) {
      out[k] = x % dims[k];
      x /= dims[k];
    }
  };
  auto is_kept = [&](int k) {
    for (int q : keep)
      if (q == k) return true;
    return false;
  };
  int dk = 1;
  for (int k : keep) dk *= dims[k];
  CMat out = CMat::Zero(dk, dk);
  const int d = static_cast<int>(rho.rows());
  for (int i = 0; i < d; ++i) {
    digits_of(i, digits_i);
    for (int j = 0; j < d; ++j) {
      digits_of(j, digits_j);
      bool traced_match = true;
      for (int k = 0; k < n; ++k) {
        if (!is_kept(k) && digits_i[k] != digits_j[k]) traced_match = false;
      }
      if (!traced_match) continue;
      int ki = 0, kj = 0;
      for (int k : keep) {
        ki = ki * dims[k] + digits_i[k];
        kj = kj * dims[k] + digits_j[k];
      }
      out(ki, kj) += rho(i, j);
    }
  }
  return out;
}

inline CMat random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline CMat random_hermitian(int dim, std::mt19937_64& rng) {
  const CMat m = random_matrix(dim, rng);
  return 0.5 * (m + m.adjoint());
}

inline CMat random_density(int dim, std::mt19937_64& rng) {
  const CMat g = random_matrix(dim, rng);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline CMat random_unitary(int dim, std::mt19937_64& rng) {
  const CMat g = random_matrix(dim, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  // Fix the phase convention so columns are deterministic in distribution.
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= d / std::abs(d);
  }
  return q;
}

}  // namespace testutil
