#include <doctest.h>

#include <random>

#include "vqs/mpo.hpp"
#include "vqs/mps.hpp"

using namespace vqs;

TEST_SUITE("mpo") {

TEST_CASE("ising MPO has bond dimension 3 and exact matrix elements") {
  for (int n : {3, 5}) {
    const PauliSum h = ising_example_hamiltonian(n, 1.3, 0.7);
    const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
    CHECK(mpo.max_bond_dim() == 3);
    CHECK((mpo_to_dense(mpo) - to_dense(h)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("single-term MPO needs bond dimension 2") {
  PauliSum h(2);
  h.add_term("ZI", 1.0);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  CHECK(mpo.max_bond_dim() == 2);
  CHECK((mpo_to_dense(mpo) - to_dense(h)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hubbard snake MPO matches the dense Hamiltonian") {
  HubbardParams p;
  p.n_sites = 3;
  p.u = 4.0;
  const PauliSum h = hubbard_hamiltonian(p);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  CHECK((mpo_to_dense(mpo) - to_dense(h)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("interleaved hubbard MPO (three-site strings) is exact") {
  HubbardParams p;
  p.n_sites = 3;
  p.u = 2.0;
  p.ordering = HubbardOrdering::Interleaved;
  const PauliSum h = hubbard_hamiltonian(p);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  CHECK((mpo_to_dense(mpo) - to_dense(h)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("schwinger hand-built MPO: bond dimension 5, exact elements") {
  for (int n : {4, 6, 8}) {
    SchwingerParams p;
    p.n_sites = n;
    p.x = 100.0;
    p.mu = 2.5;
    p.ell = 0.1;
    const PauliSum h = schwinger_hamiltonian(p);
    const Mpo<double> hand = schwinger_mpo<double>(p);
    CHECK(hand.max_bond_dim() == 5);
    CHECK((mpo_to_dense(hand) - to_dense(h)).cwiseAbs().maxCoeff() <
          1e-12 * h.max_abs_coefficient() * (1 << n));
    const Mpo<double> generic = mpo_from_pauli_sum<double>(h);
    CHECK((mpo_to_dense(generic) - to_dense(h)).cwiseAbs().maxCoeff() <
          1e-12 * h.max_abs_coefficient() * (1 << n));
  }
}

TEST_CASE("constant-only operator becomes c times identity") {
  PauliSum h(3);
  h.add_constant(2.5);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  CHECK((mpo_to_dense(mpo) -
         2.5 * Eigen::MatrixXcd::Identity(8, 8))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("random pauli sums: automaton equals dense, complex and real") {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const char abc[4] = {'I', 'X', 'Y', 'Z'};
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 5);
    PauliSum h(n);
    for (int t = 0; t < 7; ++t) {
      std::string s(n, 'I');
      for (int k = 0; k < n; ++k) s[k] = abc[letter(rng)];
      h.add_term(s, coeff(rng));
    }
    h.add_constant(coeff(rng));
    h.merge();
    const Mpo<cdouble> mc = mpo_from_pauli_sum<cdouble>(h);
    CHECK((mpo_to_dense(mc) - to_dense(h)).cwiseAbs().maxCoeff() < 1e-12);
    bool odd_y = false;
    for (const auto& t : h.terms())
      if (std::popcount(t.y_mask()) % 2 == 1) odd_y = true;
    if (!odd_y) {
      const Mpo<double> md = mpo_from_pauli_sum<double>(h);
      CHECK((mpo_to_dense(md) - to_dense(h)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("real instantiation rejects odd-Y terms") {
  PauliSum h(2);
  h.add_term("YI", 1.0);
  CHECK_THROWS(mpo_from_pauli_sum<double>(h));
  CHECK_NOTHROW(mpo_from_pauli_sum<cdouble>(h));
}

TEST_CASE("mpo_expectation basics") {
  // Identity operator on a normalized state gives 1.
  PauliSum ident(4);
  ident.add_constant(1.0);
  const Mpo<cdouble> id_mpo = mpo_from_pauli_sum<cdouble>(ident);
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd psi(16);
  for (int i = 0; i < 16; ++i) psi[i] = cdouble{g(rng), g(rng)};
  psi /= psi.norm();
  auto [mps, resid] = dense_to_mps<cdouble>(psi, 2);
  CHECK(std::abs(mpo_expectation(id_mpo, mps) - cdouble{1.0, 0.0}) < 1e-12);

  // Ising on |00...0>: X terms vanish, Z terms add up.
  const int n = 5;
  const PauliSum ising = ising_example_hamiltonian(n, 1.0, 0.8);
  const Mpo<cdouble> imp = mpo_from_pauli_sum<cdouble>(ising);
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(1 << n);
  zero[0] = 1.0;
  auto [zm, zr] = dense_to_mps<cdouble>(zero, 2);
  CHECK(std::abs(mpo_expectation(imp, zm) - cdouble{-0.8 * n, 0.0}) < 1e-12);
}

TEST_CASE("mpo_expectation equals the dense expectation") {
  HubbardParams p;
  p.n_sites = 3;
  p.u = 3.0;
  const PauliSum h = hubbard_hamiltonian(p);
  const Mpo<cdouble> mpo = mpo_from_pauli_sum<cdouble>(h);
  std::mt19937_64 rng(73);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd psi(1 << 6);
  for (int i = 0; i < psi.size(); ++i) psi[i] = cdouble{g(rng), g(rng)};
  psi /= psi.norm();
  auto [mps, resid] = dense_to_mps<cdouble>(psi, 2);
  const double dense = expectation(h, StateVector(6, psi));
  CHECK(std::abs(mpo_expectation(mpo, mps) - cdouble{dense, 0.0}) < 1e-10);
}

}  // TEST_SUITE
