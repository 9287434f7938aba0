#include "sepdist/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sepdist/matcore.hpp"

namespace sepdist::qstate {

namespace {

// Row-major digit bookkeeping: subsystem 0 is the most significant digit.
std::vector<int> strides_of(const Dims& dims) {
  std::vector<int> strides(dims.size());
  int s = 1;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    strides[k] = s;
    s *= dims[k];
  }
  return strides;
}

void decompose(int index, const Dims& dims, const std::vector<int>& strides,
               std::vector<int>& digits) {
  for (std::size_t k = 0; k < dims.size(); ++k) {
    digits[k] = (index / strides[k]) % dims[k];
  }
}

int group_index(const std::vector<int>& digits, const std::vector<int>& group, const Dims& dims) {
  int idx = 0;
  for (int g : group) idx = idx * dims[g] + digits[g];
  return idx;
}

}  // namespace

Bipartition Bipartition::of(std::vector<int> left, int n_subsystems) {
  Bipartition part;
  std::sort(left.begin(), left.end());
  part.left = std::move(left);
  for (int i = 0; i < n_subsystems; ++i) {
    if (!std::binary_search(part.left.begin(), part.left.end(), i)) part.right.push_back(i);
  }
  part.validate(n_subsystems);
  return part;
}

void Bipartition::validate(int n_subsystems) const {
  if (left.empty() || right.empty()) {
    throw BadPartitionError("bipartition: both groups must be nonempty");
  }
  std::vector<int> seen(n_subsystems, 0);
  for (int i : left) {
    if (i < 0 || i >= n_subsystems) throw BadPartitionError("bipartition: index out of range");
    ++seen[i];
  }
  for (int i : right) {
    if (i < 0 || i >= n_subsystems) throw BadPartitionError("bipartition: index out of range");
    ++seen[i];
  }
  for (int c : seen) {
    if (c != 1) throw BadPartitionError("bipartition: groups must partition all subsystems");
  }
}

DensityMatrix::DensityMatrix(CMat m, Dims d) : mat(std::move(m)), dims(std::move(d)) {
  if (dims.empty() || total_dim(dims) != mat.rows() || mat.rows() != mat.cols()) {
    throw DimMismatchError("density matrix: dims do not match matrix size");
  }
  if (std::abs(mat.trace().real() - 1.0) > 1e-10 || std::abs(mat.trace().imag()) > 1e-10) {
    throw InvalidStateError("density matrix: trace must be 1");
  }
  if (!matcore::is_hermitian(mat)) {
    throw InvalidStateError("density matrix: must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (mat + mat.adjoint()),
                                             Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw InvalidStateError("density matrix: negative eigenvalue beyond tolerance");
  }
}

DensityMatrix DensityMatrix::pure(const CVec& psi, Dims dims) {
  const CVec normed = psi / psi.norm();
  return DensityMatrix(normed * normed.adjoint(), std::move(dims));
}

DensityMatrix DensityMatrix::maximally_mixed(Dims dims) {
  const int d = total_dim(dims);
  return DensityMatrix(CMat::Identity(d, d) / static_cast<double>(d), std::move(dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep_in) {
  const int n = static_cast<int>(rho.dims.size());
  std::vector<int> keep = keep_in;
  std::sort(keep.begin(), keep.end());
  if (keep.empty()) throw BadIndexError("partial_trace: keep set must be nonempty");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= n || (k > 0 && keep[k] == keep[k - 1])) {
      throw BadIndexError("partial_trace: invalid keep indices");
    }
  }
  std::vector<int> traced;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);
  }
  Dims keep_dims, traced_dims;
  for (int i : keep) keep_dims.push_back(rho.dims[i]);
  for (int i : traced) traced_dims.push_back(rho.dims[i]);
  const int dk = total_dim(keep_dims);
  const int dt = traced.empty() ? 1 : total_dim(traced_dims);

  const auto strides = strides_of(rho.dims);
  // Global index from the kept-group digits and traced-group digits.
  auto compose = [&](int kept_idx, int traced_idx) {
    int g = 0;
    for (int k = static_cast<int>(keep.size()) - 1; k >= 0; --k) {
      g += (kept_idx % keep_dims[k]) * strides[keep[k]];
      kept_idx /= keep_dims[k];
    }
    for (int k = static_cast<int>(traced.size()) - 1; k >= 0; --k) {
      g += (traced_idx % traced_dims[k]) * strides[traced[k]];
      traced_idx /= traced_dims[k];
    }
    return g;
  };

  CMat out = CMat::Zero(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) {
      Complex sum = 0.0;
      for (int t = 0; t < dt; ++t) sum += rho.mat(compose(i, t), compose(j, t));
      out(i, j) = sum;
    }
  return DensityMatrix(std::move(out), std::move(keep_dims));
}

CMat partial_transpose(const CMat& mat, const Dims& dims, const Bipartition& part) {
  const int n = static_cast<int>(dims.size());
  part.validate(n);
  const int d = total_dim(dims);
  if (mat.rows() != d || mat.cols() != d) {
    throw DimMismatchError("partial_transpose: dims do not match matrix size");
  }
  const auto strides = strides_of(dims);
  CMat out(d, d);
  std::vector<int> di(n), dj(n);
  for (int i = 0; i < d; ++i) {
    decompose(i, dims, strides, di);
    for (int j = 0; j < d; ++j) {
      decompose(j, dims, strides, dj);
      int ti = 0, tj = 0;
      for (int k = 0; k < n; ++k) {
        const bool transpose_here =
            std::binary_search(part.right.begin(), part.right.end(), k);
        ti += (transpose_here ? dj[k] : di[k]) * strides[k];
        tj += (transpose_here ? di[k] : dj[k]) * strides[k];
      }
      out(ti, tj) = mat(i, j);
    }
  }
  return out;
}

CMat partial_transpose(const DensityMatrix& rho, const Bipartition& part) {
  return partial_transpose(rho.mat, rho.dims, part);
}

namespace {
RVec pt_eigenvalues(const DensityMatrix& rho, const Bipartition& part) {
  const CMat pt = partial_transpose(rho, part);
  Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}
}  // namespace

double negativity(const DensityMatrix& rho, const Bipartition& part) {
  const RVec evals = pt_eigenvalues(rho, part);
  double neg = 0.0;
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    if (evals[k] < -kNegativityCutoff) neg -= evals[k];
  }
  return neg;
}

double min_pt_eigenvalue(const DensityMatrix& rho, const Bipartition& part) {
  return pt_eigenvalues(rho, part).minCoeff();
}

bool ball_certified_separable(const DensityMatrix& rho, const Bipartition& part) {
  part.validate(static_cast<int>(rho.dims.size()));
  const int d = rho.total();
  const double dist = (rho.mat - CMat::Identity(d, d) / static_cast<double>(d)).norm();
  return dist <= 1.0 / std::sqrt(static_cast<double>(d) * (d - 1));
}

SeparabilityVerdict assess_separability(const DensityMatrix& rho, const Bipartition& part,
                                        double tol) {
  SeparabilityVerdict verdict;
  verdict.negativity = negativity(rho, part);
  verdict.ppt = verdict.negativity <= tol;
  verdict.ball_certified = ball_certified_separable(rho, part);
  return verdict;
}

std::string separability_label(const DensityMatrix& rho, const Bipartition& part) {
  const SeparabilityVerdict verdict = assess_separability(rho, part);
  if (!verdict.ppt) return "entangled (NPT)";
  if (verdict.ball_certified) return "separable (ball-certified)";
  int dl = 1, dr = 1;
  for (int i : part.left) dl *= rho.dims[i];
  for (int i : part.right) dr *= rho.dims[i];
  const int lo = std::min(dl, dr), hi = std::max(dl, dr);
  if (lo == 2 && hi <= 3) return "separable (ppt, conclusive on 2x2 and 2x3 cuts)";
  return "ppt (not certified separable)";
}

CVec haar_random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v(dim);
  for (int k = 0; k < dim; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v[k] = Complex(re, im);
  }
  return v / v.norm();
}

CVec product_state_across(const Dims& dims, const Bipartition& part, const CVec& psi_left,
                          const CVec& psi_right) {
  const int n = static_cast<int>(dims.size());
  part.validate(n);
  int dl = 1, dr = 1;
  for (int i : part.left) dl *= dims[i];
  for (int i : part.right) dr *= dims[i];
  if (psi_left.size() != dl || psi_right.size() != dr) {
    throw DimMismatchError("product_state_across: local vector sizes do not match groups");
  }
  const int d = total_dim(dims);
  const auto strides = strides_of(dims);
  CVec out(d);
  std::vector<int> digits(n);
  for (int g = 0; g < d; ++g) {
    decompose(g, dims, strides, digits);
    out[g] = psi_left[group_index(digits, part.left, dims)] *
             psi_right[group_index(digits, part.right, dims)];
  }
  return out;
}

DensityMatrix random_separable_state(const Dims& dims, const Bipartition& part, int terms,
                                     std::uint64_t seed) {
  if (terms < 1) throw Error("random_separable_state: terms must be >= 1");
  std::mt19937_64 rng(seed);
  int dl = 1, dr = 1;
  for (int i : part.left) dl *= dims[i];
  for (int i : part.right) dr *= dims[i];
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> weights(terms);
  double wsum = 0.0;
  for (double& w : weights) {
    w = expo(rng);
    wsum += w;
  }
  const int d = total_dim(dims);
  CMat mix = CMat::Zero(d, d);
  for (int k = 0; k < terms; ++k) {
    const CVec l = haar_random_state(dl, rng);
    const CVec r = haar_random_state(dr, rng);
    const CVec psi = product_state_across(dims, part, l, r);
    mix += (weights[k] / wsum) * (psi * psi.adjoint());
  }
  // Symmetrize away accumulation noise before the invariant checks.
  mix = 0.5 * (mix + mix.adjoint());
  mix /= mix.trace().real();
  return DensityMatrix(std::move(mix), dims);
}

CMat embed_operator(const CMat& op, const std::vector<int>& positions_in, const Dims& dims) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> positions = positions_in;
  std::sort(positions.begin(), positions.end());
  int dop = 1;
  for (int p : positions) {
    if (p < 0 || p >= n) throw BadIndexError("embed_operator: position out of range");
    dop *= dims[p];
  }
  if (op.rows() != dop || op.cols() != dop) {
    throw DimMismatchError("embed_operator: operator size does not match positions");
  }
  const int d = total_dim(dims);
  const auto strides = strides_of(dims);
  CMat out = CMat::Zero(d, d);
  std::vector<int> di(n), dj(n);
  for (int i = 0; i < d; ++i) {
    decompose(i, dims, strides, di);
    for (int j = 0; j < d; ++j) {
      decompose(j, dims, strides, dj);
      bool rest_diagonal = true;
      for (int k = 0; k < n && rest_diagonal; ++k) {
        if (!std::binary_search(positions.begin(), positions.end(), k) && di[k] != dj[k]) {
          rest_diagonal = false;
        }
      }
      if (!rest_diagonal) continue;
      out(i, j) = op(group_index(di, positions, dims), group_index(dj, positions, dims));
    }
  }
  return out;
}

}  // namespace sepdist::qstate
