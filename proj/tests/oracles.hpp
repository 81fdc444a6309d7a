#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they are used to check.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using cdouble = std::complex<double>;

inline Eigen::Matrix2cd pauli_matrix(char a) {
  Eigen::Matrix2cd m;
  switch (a) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cdouble{0, -1}, cdouble{0, 1}, 0; break;
    default: m << 1, 0, 0, -1; break;  // Z
  }
  return m;
}

/// Dense operator for a single letter acting on qubit k of n, built by
/// explicit Kronecker products with qubit 0 as the least significant index.
inline Eigen::MatrixXcd one_site_dense(int n, int k, char a) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd p =
        q == k ? pauli_matrix(a) : Eigen::Matrix2cd::Identity();
    // Qubit q is the least significant factor so it multiplies from the left.
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) next.block(i * m.rows(), j * m.cols(), m.rows(), m.cols()) = p(i, j) * m;
    m = next;
  }
  return m;
}

inline double lowest_eigenvalue(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  return es.eigenvalues()(0);
}

/// Ground energy per site over t of the open-boundary tight-binding chain at
/// half filling: (2/N) * sum_{k=1..N/2} (-2 cos(k pi/(N+1))).
inline double free_fermion_energy_per_site(int n_sites) {
  double e = 0.0;
  for (int k = 1; k <= n_sites / 2; ++k)
    e += -2.0 * std::cos(k * M_PI / (n_sites + 1));
  return 2.0 * e / n_sites;
}

}  // namespace oracles
