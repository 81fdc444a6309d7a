#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vqs/models.hpp"
#include "vqs/rbm.hpp"

using namespace vqs;

namespace {

SpinConfig config_of(std::initializer_list<int> vals) {
  SpinConfig s(static_cast<int>(vals.size()));
  int k = 0;
  for (int v : vals) s[k++] = v;
  return s;
}

/// Exact Rayleigh quotient of the RBM state from its dense amplitudes.
double dense_rbm_energy(const PauliSum& h, const RbmParams& p) {
  const int n = p.n_visible();
  StateVector v = StateVector::zero(n);
  double shift = -1e300;
  std::vector<double> logs(v.dim());
  for (std::int64_t c = 0; c < v.dim(); ++c) {
    logs[c] = log_psi(p, basis_to_spin(BasisState{std::uint64_t(c), n}));
    shift = std::max(shift, logs[c]);
  }
  for (std::int64_t c = 0; c < v.dim(); ++c)
    v.amplitudes[c] = std::exp(logs[c] - shift);
  return expectation(h, v);
}

}  // namespace

TEST_SUITE("rbm") {

TEST_CASE("log_psi closed forms") {
  RbmParams p;
  p.a = Eigen::VectorXd::Zero(3);
  p.b = Eigen::VectorXd::Zero(6);
  p.w = Eigen::MatrixXd::Zero(6, 3);
  const SpinConfig s = config_of({1, -1, 1});
  CHECK(log_psi(p, s) == doctest::Approx(6.0 * std::log(2.0)).epsilon(1e-14));

  p.a = Eigen::VectorXd::Ones(3);
  CHECK(log_psi(p, s) ==
        doctest::Approx(1.0 + 6.0 * std::log(2.0)).epsilon(1e-14));

  p.w.setConstant(50.0);  // huge weights must not overflow
  const double v = log_psi(p, s);
  CHECK(std::isfinite(v));
  // One positive spin excess: |theta| = 50, log 2cosh -> |x|.
  CHECK(v == doctest::Approx(1.0 + 6.0 * 50.0).epsilon(1e-12));
}

TEST_CASE("log_derivatives analytic forms and finite differences") {
  RbmParams zero;
  zero.a = Eigen::VectorXd::Zero(4);
  zero.b = Eigen::VectorXd::Zero(8);
  zero.w = Eigen::MatrixXd::Zero(8, 4);
  const SpinConfig s0 = config_of({1, -1, -1, 1});
  const Eigen::VectorXd d0 = log_derivatives(zero, s0);
  CHECK((d0.head(4) - s0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d0.tail(8 + 32).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 0.5);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 2 * n;
    RbmParams p;
    p.a = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return g(rng); });
    p.b = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return g(rng); });
    p.w = Eigen::MatrixXd::NullaryExpr(
        m, n, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    SpinConfig s(n);
    for (int k = 0; k < n; ++k) s[k] = (rng() & 1) ? 1.0 : -1.0;
    const Eigen::VectorXd analytic = log_derivatives(p, s);
    const Eigen::VectorXd flat = p.to_flat();
    const double step = 1e-6;
    for (int k = 0; k < flat.size(); k += 1 + static_cast<int>(rng() % 7)) {
      Eigen::VectorXd fp = flat, fm = flat;
      fp[k] += step;
      fm[k] -= step;
      const double num =
          (log_psi(RbmParams::from_flat(n, m, fp), s) -
           log_psi(RbmParams::from_flat(n, m, fm), s)) /
          (2.0 * step);
      CHECK(std::abs(analytic[k] - num) < 1e-6);
    }
    // Flipping spin j negates the a-block entry exactly.
    SpinConfig sf = s;
    sf[0] = -sf[0];
    const Eigen::VectorXd flipped = log_derivatives(p, sf);
    CHECK(flipped[0] == -analytic[0]);
  }
}

TEST_CASE("local_energy on diagonal and uniform states") {
  PauliSum zz(2);
  zz.add_term("ZZ", 1.0);
  zz.add_constant(0.25);
  RbmParams p = RbmParams::gaussian_init(2, 2, 3);
  CHECK(local_energy(zz, p, config_of({1, 1})) ==
        doctest::Approx(1.25).epsilon(1e-12));

  PauliSum x0(1);
  x0.add_term("X", 1.0);
  RbmParams uniform;
  uniform.a = Eigen::VectorXd::Zero(1);
  uniform.b = Eigen::VectorXd::Zero(2);
  uniform.w = Eigen::MatrixXd::Zero(2, 1);
  CHECK(local_energy(x0, uniform, config_of({1})) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted local energies reproduce the dense expectation") {
  HubbardParams hp;
  hp.n_sites = 2;  // 4 qubits
  hp.u = 3.0;
  const PauliSum h = hubbard_hamiltonian(hp);
  const RbmParams p = RbmParams::gaussian_init(4, 2, 5, 0.3);
  // <H> = sum_s |psi|^2 E_loc(s) / sum_s |psi|^2
  double num = 0.0, den = 0.0;
  for (std::uint64_t c = 0; c < 16; ++c) {
    const SpinConfig s = basis_to_spin(BasisState{c, 4});
    const double w = std::exp(2.0 * log_psi(p, s));
    num += w * local_energy(h, p, s);
    den += w;
  }
  CHECK(num / den == doctest::Approx(dense_rbm_energy(h, p)).epsilon(1e-10));
}

TEST_CASE("uniform sampler has zero mean spins") {
  RbmParams uniform;
  uniform.a = Eigen::VectorXd::Zero(5);
  uniform.b = Eigen::VectorXd::Zero(5);
  uniform.w = Eigen::MatrixXd::Zero(5, 5);
  SamplerConfig cfg;
  cfg.n_samples = 4000;
  cfg.n_burn = 100;
  cfg.seed = 11;
  const auto res = sample(uniform, cfg);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
  for (const auto& s : res.samples) mean += s;
  mean /= res.samples.size();
  CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(4000.0));
  CHECK(res.acceptance_rate > 0.9);  // uniform target accepts everything
}

TEST_CASE("exchange moves preserve the sector") {
  const RbmParams p = RbmParams::gaussian_init(6, 2, 13, 0.2);
  SamplerConfig cfg;
  cfg.n_samples = 200;
  cfg.n_burn = 50;
  cfg.move = MoveType::ExchangePair;
  cfg.sector_total_z = 0;
  cfg.seed = 5;
  const auto res = sample(p, cfg);
  for (const auto& s : res.samples) CHECK(std::lround(s.sum()) == 0);
  SamplerConfig bad = cfg;
  bad.move = MoveType::SingleFlip;
  CHECK_THROWS(sample(p, bad));
}

TEST_CASE("metropolis histogram matches |psi|^2 [chi-squared 0.999]") {
  const int n = 4;
  const RbmParams p = RbmParams::gaussian_init(n, 1, 29, 0.35);
  // Exact distribution.
  Eigen::VectorXd prob(16);
  for (std::uint64_t c = 0; c < 16; ++c)
    prob[c] = std::exp(2.0 * log_psi(p, basis_to_spin(BasisState{c, n})));
  prob /= prob.sum();
  SamplerConfig cfg;
  cfg.n_samples = 1000000;
  cfg.n_burn = 500;
  cfg.seed = 31;
  const auto res = sample(p, cfg);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(16);
  for (const auto& s : res.samples)
    counts[static_cast<int>(spin_to_basis(s).bits)] += 1.0;
  double chi2 = 0.0;
  for (int c = 0; c < 16; ++c) {
    const double expct = prob[c] * cfg.n_samples;
    chi2 += (counts[c] - expct) * (counts[c] - expct) / expct;
  }
  // 15 degrees of freedom at the 0.999 quantile.
  CHECK(chi2 < 37.697);
}

TEST_CASE("estimate_step: zero variance on an exact eigenstate") {
  // Uniform positive psi is the ground state of -X0X1.
  PauliSum h(2);
  h.add_term("XX", -1.0);
  RbmParams uniform;
  uniform.a = Eigen::VectorXd::Zero(2);
  uniform.b = Eigen::VectorXd::Zero(2);
  uniform.w = Eigen::MatrixXd::Zero(2, 2);
  SamplerConfig cfg;
  cfg.n_samples = 200;
  cfg.n_burn = 20;
  cfg.seed = 3;
  const auto res = sample(uniform, cfg);
  const auto est = estimate_step(h, uniform, res.samples);
  CHECK(est.energy_mean == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(est.f.cwiseAbs().maxCoeff() < 1e-10);

  double var = 0.0;
  for (const auto& s : res.samples) {
    const double el = local_energy(h, uniform, s);
    var += (el + 1.0) * (el + 1.0);
  }
  CHECK(var / res.samples.size() < 1e-10);
}

TEST_CASE("S matrix is positive semidefinite") {
  HubbardParams hp;
  hp.n_sites = 2;
  hp.u = 2.0;
  const PauliSum h = hubbard_hamiltonian(hp);
  const RbmParams p = RbmParams::gaussian_init(4, 2, 41, 0.2);
  SamplerConfig cfg;
  cfg.n_samples = 150;
  cfg.n_burn = 50;
  cfg.seed = 17;
  const auto res = sample(p, cfg);
  const auto est = estimate_step(h, p, res.samples);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.s_matrix);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("exact-summation gradient matches finite differences") {
  HubbardParams hp;
  hp.n_sites = 2;
  hp.u = 1.5;
  const PauliSum h = hubbard_hamiltonian(hp);
  RbmParams p = RbmParams::gaussian_init(4, 1, 43, 0.25);
  const auto est = estimate_exact(h, p);
  CHECK(est.energy_mean ==
        doctest::Approx(dense_rbm_energy(h, p)).epsilon(1e-11));
  const double step = 1e-5;
  const Eigen::VectorXd flat = p.to_flat();
  for (int k = 0; k < flat.size(); ++k) {
    Eigen::VectorXd fp = flat, fm = flat;
    fp[k] += step;
    fm[k] -= step;
    const double ep = dense_rbm_energy(h, RbmParams::from_flat(4, 4, fp));
    const double em = dense_rbm_energy(h, RbmParams::from_flat(4, 4, fm));
    CHECK(std::abs(est.f[k] - (ep - em) / (2.0 * step)) < 1e-4);
  }
}

TEST_CASE("sr_update algebra") {
  RbmParams p;
  p.a = Eigen::VectorXd::Zero(2);
  p.b = Eigen::VectorXd(0);
  p.w = Eigen::MatrixXd(0, 2);
  SrConfig cfg;
  cfg.eta = 0.7;
  cfg.lambda_reg = 0.0;

  // f = 0 leaves parameters unchanged.
  const auto same = sr_update(p, Eigen::VectorXd::Zero(2),
                              Eigen::MatrixXd::Identity(2, 2), cfg);
  CHECK(same.a.cwiseAbs().maxCoeff() == 0.0);

  // S = I reduces SR to plain gradient descent.
  Eigen::VectorXd f(2);
  f << 0.3, -0.4;
  const auto sr_step =
      sr_update(p, f, Eigen::MatrixXd::Identity(2, 2), cfg);
  SrConfig plain = cfg;
  plain.mode = SrMode::PlainGradient;
  const auto gd_step =
      sr_update(p, f, Eigen::MatrixXd::Identity(2, 2), plain);
  CHECK((sr_step.a - gd_step.a).cwiseAbs().maxCoeff() < 1e-14);

  // Quadratic objective E = (theta - t*)' A (theta - t*) / 2 with S = A and
  // eta = 1: one SR step lands exactly on the minimizer.
  Eigen::MatrixXd a_mat(2, 2);
  a_mat << 2.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd target(2);
  target << 0.8, -0.3;
  RbmParams start;
  start.a = Eigen::VectorXd::Zero(2);
  start.b = Eigen::VectorXd(0);
  start.w = Eigen::MatrixXd(0, 2);
  start.a << 2.0, 1.0;
  const Eigen::VectorXd grad = a_mat * (start.a - target);
  SrConfig one;
  one.eta = 1.0;
  one.lambda_reg = 0.0;
  const auto stepped = sr_update(start, grad, a_mat, one);
  CHECK((stepped.a - target).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("vmc exact summation reaches the two-qubit ground state") {
  PauliSum h(2);
  h.add_term("XX", -1.0);
  const RbmParams init = RbmParams::gaussian_init(2, 2, 7);
  SamplerConfig sc;
  SrConfig sr;
  sr.eta = 0.05;
  sr.n_iters = 2000;
  const auto res = vmc_run(h, init, sc, sr, VmcEstimator::ExactSum);
  CHECK(res.trace.back().energy_mean == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(res.trace.back().energy_mean >= -1.0 - 1e-10);  // variational bound
}

TEST_CASE("checkpoint round trip") {
  const RbmParams p = RbmParams::gaussian_init(3, 2, 99, 0.5);
  std::ostringstream os;
  save_rbm(os, p);
  std::istringstream is(os.str());
  const RbmParams back = load_rbm(is);
  CHECK((back.to_flat() - p.to_flat()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binned error of a constant series is zero") {
  std::vector<double> series(200, 1.5);
  auto [mean, err] = binned_stats(series);
  CHECK(mean == doctest::Approx(1.5));
  CHECK(err == 0.0);
}

}  // TEST_SUITE
