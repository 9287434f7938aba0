#pragma once

#include <Eigen/Dense>

#include "sepdist/errors.hpp"
#include "sepdist/types.hpp"

// Dense complex linear algebra over small dimensions (<= 64). Everything here
// is a pure function on value-semantic inputs and is safe to call
// concurrently.
namespace sepdist::matcore {

enum class NormKind { spectral, frobenius, trace };

// Tolerance used both to accept inputs as Hermitian and to reject them.
inline constexpr double kHermitianTol = 1e-10;

/// Kronecker (tensor) product; the first factor is the most significant
/// index block of the result.
CMat kron(const CMat& a, const CMat& b);
CMat kron3(const CMat& a, const CMat& b, const CMat& c);

struct HermitianEig {
  RVec evals;  // ascending
  CMat evecs;  // unitary, column k pairs with evals[k]
};

/// Eigendecomposition of a Hermitian matrix, h = V diag(evals) V^dagger.
/// Throws NotHermitianError if ||h - h^dagger||_spec exceeds kHermitianTol.
HermitianEig hermitian_eig(const CMat& h);

/// exp(-i h t) for Hermitian h, computed by exact eigendecomposition so the
/// result is unitary to machine precision.
CMat expm_i(const CMat& h, double t);

double norm(const CMat& a, NormKind kind);

bool is_hermitian(const CMat& a, double tol = kHermitianTol);

/// Determinant of the 3x3 Vandermonde matrix on nodes d:
/// (d1-d0)(d2-d0)(d2-d1).
double vandermonde_det(const Eigen::Vector3d& d);

CMat identity(int dim);
CMat pauli_x();

}  // namespace sepdist::matcore
