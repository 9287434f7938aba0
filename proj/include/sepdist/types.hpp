#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace sepdist {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

using Dims = std::vector<int>;

inline int total_dim(const Dims& dims) {
  int d = 1;
  for (int x : dims) d *= x;
  return d;
}

}  // namespace sepdist
