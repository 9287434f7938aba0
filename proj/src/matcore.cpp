#include "sepdist/matcore.hpp"

#include <cmath>

namespace sepdist::matcore {

CMat kron(const CMat& a, const CMat& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols();
  const Eigen::Index rb = b.rows(), cb = b.cols();
  CMat out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

CMat kron3(const CMat& a, const CMat& b, const CMat& c) {
  return kron(kron(a, b), c);
}

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return norm(a - a.adjoint(), NormKind::spectral) <= tol;
}

HermitianEig hermitian_eig(const CMat& h) {
  if (!is_hermitian(h)) {
    throw NotHermitianError("hermitian_eig: input is not Hermitian within tolerance");
  }
  // Symmetrize so the decomposition is exact for the matrix we factor.
  const CMat hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(hs);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eig: eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMat expm_i(const CMat& h, double t) {
  const HermitianEig eig = hermitian_eig(h);
  const Eigen::Index n = h.rows();
  CVec phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases[k] = std::exp(Complex(0.0, -eig.evals[k] * t));
  }
  return eig.evecs * phases.asDiagonal() * eig.evecs.adjoint();
}

double norm(const CMat& a, NormKind kind) {
  switch (kind) {
    case NormKind::frobenius:
      return a.norm();
    case NormKind::spectral: {
      Eigen::JacobiSVD<CMat> svd(a);
      return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    }
    case NormKind::trace: {
      Eigen::JacobiSVD<CMat> svd(a);
      return svd.singularValues().sum();
    }
  }
  throw Error("norm: unknown kind");
}

double vandermonde_det(const Eigen::Vector3d& d) {
  return (d[1] - d[0]) * (d[2] - d[0]) * (d[2] - d[1]);
}

CMat identity(int dim) { return CMat::Identity(dim, dim); }

CMat pauli_x() {
  CMat x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

}  // namespace sepdist::matcore
