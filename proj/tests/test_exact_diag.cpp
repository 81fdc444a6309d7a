#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vqs/exact_diag.hpp"
#include "vqs/models.hpp"

using namespace vqs;

namespace {

// Z sums fixed to zero on each spin leg of the snake-ordered chain.
SectorSpec hubbard_half_filling_sector(int n_sites) {
  SectorSpec::ZSumConstraint up, down;
  for (int j = 0; j < n_sites; ++j) {
    up.qubits.push_back(j);
    down.qubits.push_back(n_sites + j);
  }
  up.target = 0;
  down.target = 0;
  return SectorSpec::z_sums({up, down});
}

}  // namespace

TEST_SUITE("exact_diag") {

TEST_CASE("single qubit Z ground state") {
  PauliSum h(1);
  h.add_term("Z", 1.0);
  const auto r = ground_state(h, SectorSpec::none());
  CHECK(r.energy == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(std::abs(r.vector.amplitudes[1]) == doctest::Approx(1.0));
  CHECK(r.residual_norm < 1e-11);
}

TEST_CASE("sector basis counting") {
  CHECK(sector_basis(4, SectorSpec::total_z(4, 0)).dim() == 6);
  CHECK(sector_basis(2, SectorSpec::total_z(2, 2)).dim() == 1);
  CHECK(sector_basis(16, SectorSpec::total_z(16, 0)).dim() == 12870);
  CHECK_THROWS(sector_basis(4, SectorSpec::total_z(4, 3)));
}

TEST_CASE("lanczos matches dense diagonalization") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> letter(0, 3);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const char abc[4] = {'I', 'X', 'Y', 'Z'};
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 3 + static_cast<int>(rng() % 4);
    PauliSum h(n);
    for (int t = 0; t < 12; ++t) {
      std::string s(n, 'I');
      for (int k = 0; k < n; ++k) s[k] = abc[letter(rng)];
      h.add_term(s, coeff(rng));
    }
    h.merge();
    const auto r = ground_state(h, SectorSpec::none());
    CHECK(r.energy ==
          doctest::Approx(oracles::lowest_eigenvalue(to_dense(h)))
              .epsilon(1e-11));
  }
}

TEST_CASE("hubbard table values via sector Lanczos") {
  struct Row {
    int n;
    double u;
    double e;
  };
  // Exact-diagonalization references for E0/(tN).
  const Row rows[] = {
      {4, 4.0, -2.48828632717113},
      {6, 4.0, -2.51542755325090},
  };
  for (const auto& row : rows) {
    HubbardParams p;
    p.n_sites = row.n;
    p.u = row.u;
    const PauliSum h = hubbard_hamiltonian(p);
    const auto r = ground_state(h, hubbard_half_filling_sector(row.n));
    CHECK(std::abs(r.energy - row.e) < 1e-10);
  }
}

TEST_CASE("sector-restricted energy equals full-space at half filling") {
  for (int n : {2, 4}) {
    for (double u : {0.0, 4.0}) {
      HubbardParams p;
      p.n_sites = n;
      p.u = u;
      const PauliSum h = hubbard_hamiltonian(p);
      const auto full = ground_state(h, SectorSpec::none());
      const auto sec = ground_state(h, hubbard_half_filling_sector(n));
      CHECK(sec.energy >= full.energy - 1e-10);
      CHECK(std::abs(sec.energy - full.energy) < 1e-10);
    }
  }
}

TEST_CASE("schwinger ground state lies in the zero-charge sector") {
  for (double mu : {0.0, 2.5}) {
    SchwingerParams p;
    p.n_sites = 4;
    p.x = 100.0;
    p.mu = mu;
    const PauliSum h = schwinger_hamiltonian(p);
    const auto full = ground_state(h, SectorSpec::none());
    const auto sec = ground_state(h, SectorSpec::total_z(4, 0));
    CHECK(std::abs(sec.energy - full.energy) < 1e-9);
  }
}

TEST_CASE("schwinger N=8 x=100 mu=2.5 tabulated value") {
  SchwingerParams p;
  p.n_sites = 8;
  p.x = 100.0;
  p.mu = 2.5;
  const auto r = ground_state(schwinger_hamiltonian(p), SectorSpec::total_z(8, 0));
  CHECK(r.energy / 8.0 == doctest::Approx(-57.9669117540).epsilon(1e-10));
}

TEST_CASE("sector leakage raises a precondition error") {
  PauliSum h(2);
  h.add_term("XI", 1.0);  // single X breaks any TotalZ sector
  CHECK_THROWS_AS(ground_state(h, SectorSpec::total_z(2, 0)),
                  std::invalid_argument);
}

TEST_CASE("energy invariant under qubit relabeling") {
  HubbardParams p;
  p.n_sites = 3;
  p.u = 2.0;
  const auto snake = ground_state(hubbard_hamiltonian(p), SectorSpec::none());
  p.ordering = HubbardOrdering::Interleaved;
  const auto inter = ground_state(hubbard_hamiltonian(p), SectorSpec::none());
  CHECK(std::abs(snake.energy - inter.energy) < 1e-12);
}

TEST_CASE("non-convergence reports an explicit failure") {
  HubbardParams p;
  p.n_sites = 4;
  p.u = 4.0;
  GroundStateOptions opts;
  opts.max_iter = 3;
  CHECK_THROWS_AS(
      ground_state(hubbard_hamiltonian(p), SectorSpec::none(), opts),
      std::runtime_error);
}

TEST_CASE("expectation of the Hamiltonian on the ED vector") {
  HubbardParams p;
  p.n_sites = 2;
  p.u = 3.0;
  const PauliSum h = hubbard_hamiltonian(p);
  const auto r = ground_state(h, SectorSpec::none());
  CHECK(expectation(h, r.vector) == doctest::Approx(r.energy).epsilon(1e-11));
}

}  // TEST_SUITE
