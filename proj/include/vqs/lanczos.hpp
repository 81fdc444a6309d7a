#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace vqs {

template <typename Scalar>
struct LanczosResult {
  double eigenvalue = 0.0;
  Eigen::Vector<Scalar, Eigen::Dynamic> eigenvector;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lanczos iteration for the lowest eigenpair of a Hermitian operator given
/// only its action on a vector. Full reorthogonalization against the stored
/// basis keeps the recursion free of ghost eigenvalues at these problem
/// sizes. Deterministic for a fixed start vector.
template <typename Scalar, typename MatVec>
LanczosResult<Scalar> lanczos_lowest(
    const MatVec& apply, Eigen::Vector<Scalar, Eigen::Dynamic> start,
    int max_iter, double tol) {
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  const double nrm0 = start.norm();
  if (!(nrm0 > 0.0)) throw std::invalid_argument("lanczos: zero start vector");

  std::vector<Vec> basis;
  std::vector<double> alpha, beta;  // tridiagonal entries
  basis.push_back(start / nrm0);

  LanczosResult<Scalar> res;
  Eigen::VectorXd ritz_vec;
  double ritz_val = 0.0;

  for (int k = 0; k < max_iter; ++k) {
    Vec w = apply(basis[k]);
    const double a = std::real(Scalar(basis[k].dot(w)));
    alpha.push_back(a);
    w -= Scalar(a) * basis[k];
    if (k > 0) w -= Scalar(beta[k - 1]) * basis[k - 1];
    // Two passes of Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) w -= v.dot(w) * v;

    // Solve the (k+1) x (k+1) tridiagonal eigenproblem.
    const int m = k + 1;
    Eigen::VectorXd adiag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd bsub = m > 1 ? Eigen::Map<const Eigen::VectorXd>(
                                       beta.data(), m - 1)
                                 : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(adiag, bsub, Eigen::ComputeEigenvectors);
    ritz_val = es.eigenvalues()(0);
    ritz_vec = es.eigenvectors().col(0);

    const double b = w.norm();
    const double resid = b * std::abs(ritz_vec(m - 1));
    res.eigenvalue = ritz_val;
    res.residual_norm = resid;
    res.iterations = m;
    if (resid <= tol * std::max(1.0, std::abs(ritz_val)) ||
        b <= 1e-14 * std::max(1.0, std::abs(ritz_val)) || m == max_iter ||
        m == static_cast<int>(start.size())) {
      res.converged = resid <= tol * std::max(1.0, std::abs(ritz_val)) ||
                      b <= 1e-14 * std::max(1.0, std::abs(ritz_val));
      break;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }

  Vec ground = Vec::Zero(start.size());
  for (int i = 0; i < res.iterations; ++i)
    ground += Scalar(ritz_vec(i)) * basis[i];
  ground /= ground.norm();
  res.eigenvector = std::move(ground);
  // Exact residual of the assembled Ritz vector.
  Vec hv = apply(res.eigenvector);
  res.residual_norm = (hv - Scalar(res.eigenvalue) * res.eigenvector).norm();
  res.converged =
      res.residual_norm <= tol * std::max(1.0, std::abs(res.eigenvalue));
  return res;
}

}  // namespace vqs
