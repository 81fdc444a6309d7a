#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vqs/dmrg.hpp"
#include "vqs/exact_diag.hpp"

using namespace vqs;

namespace {

TwoSiteBlock<double> random_theta(std::mt19937_64& rng, int chi_l,
                                  int chi_r) {
  std::normal_distribution<double> g(0.0, 1.0);
  TwoSiteBlock<double> t(2, std::vector<Mat<double>>(2));
  double sq = 0.0;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      t[s1][s2] = Mat<double>::NullaryExpr(
          chi_l, chi_r, [&](Eigen::Index, Eigen::Index) { return g(rng); });
      sq += t[s1][s2].squaredNorm();
    }
  for (auto& row : t)
    for (auto& m : row) m /= std::sqrt(sq);
  return t;
}

double theta_overlap(const TwoSiteBlock<double>& a,
                     const TwoSiteBlock<double>& b) {
  double acc = 0.0;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      acc += (a[s1][s2].array() * b[s1][s2].array()).sum();
  return acc;
}

}  // namespace

TEST_SUITE("dmrg") {

TEST_CASE("truncate_split on a rank-1 block is exact") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  // theta[s1][s2](a,b) = u[s1,a] v[s2,b] has Schmidt rank 1.
  Eigen::MatrixXd u(2, 3), v(2, 3);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 3; ++a) {
      u(s, a) = g(rng);
      v(s, a) = g(rng);
    }
  const double nrm = u.norm() * v.norm();
  TwoSiteBlock<double> theta(2, std::vector<Mat<double>>(2));
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta[s1][s2] = (u.row(s1).transpose() * v.row(s2)) / nrm;
  auto split = truncate_split(theta, 1, 1e-12);
  CHECK(split.discarded_weight < 1e-14);
  CHECK(split.lambda.size() == 1);
}

TEST_CASE("truncate_split of a Bell block to chi=1 discards half the weight") {
  // theta = (|00> + |11>)/sqrt(2) across the bond.
  TwoSiteBlock<double> theta(2, std::vector<Mat<double>>(
                                    2, Mat<double>::Zero(1, 1)));
  theta[0][0](0, 0) = 1.0 / std::sqrt(2.0);
  theta[1][1](0, 0) = 1.0 / std::sqrt(2.0);
  auto split = truncate_split(theta, 1, 1e-12);
  CHECK(split.discarded_weight == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(split.lambda.size() == 1);
  CHECK(split.lambda[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncate_split without truncation reproduces the block") {
  std::mt19937_64 rng(11);
  auto theta = random_theta(rng, 3, 4);
  auto split = truncate_split(theta, 64, 1e-15);
  CHECK(split.discarded_weight < 1e-13);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      const Mat<double> back = split.a[s1] *
                               split.lambda.asDiagonal() * split.b[s2];
      CHECK((back - theta[s1][s2]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("local_ground with the identity operator returns eigenvalue 1") {
  PauliSum ident(2);
  ident.add_constant(1.0);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(ident);
  std::vector<Mat<double>> left(mpo.sites[0].w_l), right(mpo.sites[1].w_r);
  for (int w = 0; w < mpo.sites[0].w_l; ++w)
    left[w] = mpo.boundary_left(w) * Mat<double>::Ones(1, 1);
  for (int w = 0; w < mpo.sites[1].w_r; ++w)
    right[w] = mpo.boundary_right(w) * Mat<double>::Ones(1, 1);
  std::mt19937_64 rng(13);
  auto theta = random_theta(rng, 1, 1);
  auto res = local_ground<double>(left, mpo.sites[0], mpo.sites[1], right,
                                  theta, 1e-12, 50);
  CHECK(res.eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-site chain: the local problem is the full Hamiltonian") {
  const PauliSum h = ising_example_hamiltonian(2, 1.0, 0.5);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  std::vector<Mat<double>> left(mpo.sites[0].w_l), right(mpo.sites[1].w_r);
  for (int w = 0; w < mpo.sites[0].w_l; ++w)
    left[w] = mpo.boundary_left(w) * Mat<double>::Ones(1, 1);
  for (int w = 0; w < mpo.sites[1].w_r; ++w)
    right[w] = mpo.boundary_right(w) * Mat<double>::Ones(1, 1);
  std::mt19937_64 rng(17);
  auto theta = random_theta(rng, 1, 1);
  auto res = local_ground<double>(left, mpo.sites[0], mpo.sites[1], right,
                                  theta, 1e-13, 50);
  CHECK(res.eigenvalue ==
        doctest::Approx(oracles::lowest_eigenvalue(to_dense(h)))
            .epsilon(1e-12));
}

TEST_CASE("local energy never exceeds the starting Rayleigh quotient") {
  const PauliSum h = ising_example_hamiltonian(6, 1.0, 1.0);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  Mps<double> mps = random_mps<double>(6, 2, 4, 19);
  MixedCanonical<double> mc = mixed_canonicalize(mps, 3);
  mc.lambda /= mc.lambda.norm();
  auto env = build_environments(mpo, mc, 3);
  TwoSiteBlock<double> theta(2, std::vector<Mat<double>>(2));
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta[s1][s2] = mc.lambda.cast<double>().asDiagonal() *
                      mc.right[0][s1] * mc.right[1][s2];
  const auto h_theta =
      apply_effective<double>(env.left[3], mpo.sites[3], mpo.sites[4],
                              env.right[5], theta);
  const double rq0 = theta_overlap(theta, h_theta);
  auto theta_copy = theta;
  auto res = local_ground<double>(env.left[3], mpo.sites[3], mpo.sites[4],
                                  env.right[5], theta_copy, 1e-12, 60);
  CHECK(res.eigenvalue <= rq0 + 1e-10);
}

TEST_CASE("build_environments boundaries and full-sandwich consistency") {
  HubbardParams p;
  p.n_sites = 3;
  p.u = 2.0;
  const PauliSum h = hubbard_hamiltonian(p);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  Mps<double> mps = random_mps<double>(6, 2, 4, 23);
  const int center = 2;
  MixedCanonical<double> mc = mixed_canonicalize(mps, center);
  const double nrm = mc.lambda.norm();
  mc.lambda /= nrm;
  auto env = build_environments(mpo, mc, center);

  // Boundary initializers.
  for (int w = 0; w < mpo.sites[0].w_l; ++w)
    CHECK(env.left[0][w](0, 0) == mpo.boundary_left(w));
  for (int w = 0; w < mpo.sites.back().w_r; ++w)
    CHECK(env.right[6][w](0, 0) == mpo.boundary_right(w));

  // Contracting L[center], the center weights on both bond legs and
  // R[center] reproduces the full expectation value.
  Mps<double> full = mc.to_mps();
  const double via_mpo = mpo_expectation(mpo, full);
  double via_env = 0.0;
  const Eigen::MatrixXd outer = mc.lambda * mc.lambda.transpose();
  for (std::size_t w = 0; w < env.left[center].size(); ++w)
    via_env += (env.left[center][w].cwiseProduct(outer).cwiseProduct(
                    env.right[center][w]))
                   .sum();
  CHECK(via_env == doctest::Approx(via_mpo).epsilon(1e-9));
}

TEST_CASE("dmrg solves the ising chain to ED accuracy") {
  const PauliSum h = ising_example_hamiltonian(8, 1.0, 1.0);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  DmrgConfig cfg;
  cfg.chi_max = 32;
  cfg.n_sweeps = 6;
  auto res = dmrg_ground_state(mpo, cfg);
  const auto ed = ground_state(h, SectorSpec::none());
  CHECK(std::abs(res.energy - ed.energy) < 1e-9);
}

TEST_CASE("dmrg trace is non-increasing") {
  HubbardParams p;
  p.n_sites = 4;
  p.u = 4.0;
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(hubbard_hamiltonian(p));
  DmrgConfig cfg;
  cfg.chi_max = 64;
  cfg.n_sweeps = 6;
  auto res = dmrg_ground_state(mpo, cfg);
  for (std::size_t k = 1; k < res.trace.size(); ++k)
    CHECK(res.trace[k] <=
          res.trace[k - 1] + 1e-12 * (1.0 + std::abs(res.trace[k - 1])));
  const auto ed = ground_state(hubbard_hamiltonian(p), SectorSpec::none());
  CHECK(std::abs(res.energy - ed.energy) < 1e-9);
}

TEST_CASE("final dmrg state is mixed canonical with exact conditions") {
  const PauliSum h = ising_example_hamiltonian(7, 1.0, 0.6);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  DmrgConfig cfg;
  cfg.chi_max = 24;
  cfg.n_sweeps = 5;
  auto res = dmrg_ground_state(mpo, cfg);
  Mps<double> left_part, right_part;
  left_part.sites = res.state.left;
  right_part.sites = res.state.right;
  if (!left_part.sites.empty())
    CHECK(left_canonical_residual(left_part) < 1e-10);
  if (!right_part.sites.empty())
    CHECK(right_canonical_residual(right_part) < 1e-10);
  CHECK(res.state.lambda.norm() == doctest::Approx(1.0).epsilon(1e-10));
  // Energy of the returned state equals the reported energy.
  const double check = mpo_expectation(mpo, res.state.to_mps());
  CHECK(check == doctest::Approx(res.energy).epsilon(1e-9));
}

TEST_CASE("truncation error falls as chi_max doubles") {
  const PauliSum h = ising_example_hamiltonian(8, 1.0, 1.0);
  const Mpo<double> mpo = mpo_from_pauli_sum<double>(h);
  const auto ed = ground_state(h, SectorSpec::none());
  double prev_err = 1e9;
  for (int chi : {2, 4, 8, 16}) {
    DmrgConfig cfg;
    cfg.chi_max = chi;
    cfg.n_sweeps = 6;
    cfg.svd_cutoff = 0.0;
    auto res = dmrg_ground_state(mpo, cfg);
    const double err = std::abs(res.energy - ed.energy);
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
  }
  CHECK(prev_err < 1e-8);
}

TEST_CASE("schwinger dmrg with the hand-built MPO hits the ED value") {
  SchwingerParams p;
  p.n_sites = 8;
  p.x = 100.0;
  p.mu = 2.5;
  const Mpo<double> mpo = schwinger_mpo<double>(p);
  DmrgConfig cfg;
  cfg.chi_max = 64;
  cfg.n_sweeps = 8;
  auto res = dmrg_ground_state(mpo, cfg);
  CHECK(res.energy / 8.0 == doctest::Approx(-57.9669117540).epsilon(5e-11));
}

}  // TEST_SUITE
