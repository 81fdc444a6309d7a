#pragma once

#include <stdexcept>
#include <vector>

#include "vqs/lanczos.hpp"
#include "vqs/mpo.hpp"
#include "vqs/mps.hpp"

namespace vqs {

/// Cached boundary contractions. left[c][w] and right[c][w] are
/// (bra bond x ket bond) matrices at cut c for operator-bond state w; only
/// the cuts a sweep needs are populated.
template <typename Scalar>
struct Environments {
  std::vector<std::vector<Mat<Scalar>>> left;   // indexed by cut 0..N
  std::vector<std::vector<Mat<Scalar>>> right;  // indexed by cut 0..N
};

namespace detail {

/// Moves a left environment through one site: contract with W, the ket
/// tensor and the conjugated bra tensor.
template <typename Scalar>
std::vector<Mat<Scalar>> advance_left(
    const std::vector<Mat<Scalar>>& env,
    const typename Mpo<Scalar>::Site& w, const SiteTensor<Scalar>& a) {
  const int d = static_cast<int>(a.size());
  const int chi_r = static_cast<int>(a[0].cols());
  std::vector<Mat<Scalar>> next(w.w_r, Mat<Scalar>::Zero(chi_r, chi_r));
  for (const auto& tr : w.transitions) {
    if (env[tr.from].size() == 0) continue;
    for (int s = 0; s < d; ++s)
      for (int sp = 0; sp < d; ++sp) {
        if (tr.op(s, sp) == Scalar(0)) continue;
        next[tr.to] +=
            tr.op(s, sp) * (a[s].adjoint() * env[tr.from] * a[sp]);
      }
  }
  return next;
}

template <typename Scalar>
std::vector<Mat<Scalar>> advance_right(
    const std::vector<Mat<Scalar>>& env,
    const typename Mpo<Scalar>::Site& w, const SiteTensor<Scalar>& b) {
  const int d = static_cast<int>(b.size());
  const int chi_l = static_cast<int>(b[0].rows());
  std::vector<Mat<Scalar>> next(w.w_l, Mat<Scalar>::Zero(chi_l, chi_l));
  for (const auto& tr : w.transitions) {
    if (env[tr.to].size() == 0) continue;
    for (int s = 0; s < d; ++s)
      for (int sp = 0; sp < d; ++sp) {
        if (tr.op(s, sp) == Scalar(0)) continue;
        next[tr.from] += tr.op(s, sp) * (b[s].conjugate() * env[tr.to] *
                                         b[sp].transpose());
      }
  }
  return next;
}

}  // namespace detail

/// Two-site block Theta[s1][s2], each matrix chi_l x chi_r.
template <typename Scalar>
using TwoSiteBlock = std::vector<std::vector<Mat<Scalar>>>;

/// Environments for a state in mixed canonical form at bond `center`:
/// left[0..center] from the A tensors, right[center..N] from the B tensors.
template <typename Scalar>
Environments<Scalar> build_environments(const Mpo<Scalar>& o,
                                        const MixedCanonical<Scalar>& m,
                                        int center) {
  if (m.center != center)
    throw std::invalid_argument("build_environments: center mismatch");
  const int n = o.n_sites();
  Environments<Scalar> env;
  env.left.resize(n + 1);
  env.right.resize(n + 1);
  env.left[0].resize(o.sites[0].w_l);
  for (int w = 0; w < o.sites[0].w_l; ++w)
    env.left[0][w] = o.boundary_left(w) * Mat<Scalar>::Ones(1, 1);
  for (int i = 0; i < center; ++i)
    env.left[i + 1] =
        detail::advance_left<Scalar>(env.left[i], o.sites[i], m.left[i]);
  env.right[n].resize(o.sites[n - 1].w_r);
  for (int w = 0; w < o.sites[n - 1].w_r; ++w)
    env.right[n][w] = o.boundary_right(w) * Mat<Scalar>::Ones(1, 1);
  for (int i = n - 1; i >= center; --i)
    env.right[i] = detail::advance_right<Scalar>(
        env.right[i + 1], o.sites[i], m.right[i - center]);
  return env;
}

/// H_eff applied to a two-site block: contraction of the left environment,
/// the two site operators and the right environment against Theta.
template <typename Scalar>
TwoSiteBlock<Scalar> apply_effective(const std::vector<Mat<Scalar>>& left,
                                     const typename Mpo<Scalar>::Site& w1,
                                     const typename Mpo<Scalar>::Site& w2,
                                     const std::vector<Mat<Scalar>>& right,
                                     const TwoSiteBlock<Scalar>& theta) {
  const int d = static_cast<int>(theta.size());
  const int rows = static_cast<int>(theta[0][0].rows());
  const int cols = static_cast<int>(theta[0][0].cols());
  // P[w][s1'][s2'] = left[w] * theta[s1'][s2']
  std::vector<TwoSiteBlock<Scalar>> p(
      left.size(),
      TwoSiteBlock<Scalar>(d, std::vector<Mat<Scalar>>(d)));
  for (std::size_t w = 0; w < left.size(); ++w) {
    if (left[w].size() == 0) continue;
    for (int s1 = 0; s1 < d; ++s1)
      for (int s2 = 0; s2 < d; ++s2)
        p[w][s1][s2] = left[w] * theta[s1][s2];
  }
  // Q[w][s1][s2'] += op1(s1,s1') P[w_from][s1'][s2']
  std::vector<TwoSiteBlock<Scalar>> q(
      w1.w_r, TwoSiteBlock<Scalar>(
                  d, std::vector<Mat<Scalar>>(d, Mat<Scalar>::Zero(rows, cols))));
  for (const auto& tr : w1.transitions) {
    if (p[tr.from][0][0].size() == 0) continue;
    for (int s1 = 0; s1 < d; ++s1)
      for (int s1p = 0; s1p < d; ++s1p) {
        if (tr.op(s1, s1p) == Scalar(0)) continue;
        for (int s2 = 0; s2 < d; ++s2)
          q[tr.to][s1][s2] += tr.op(s1, s1p) * p[tr.from][s1p][s2];
      }
  }
  // S[w][s1][s2] += op2(s2,s2') Q[w_from][s1][s2']; then close with right.
  TwoSiteBlock<Scalar> out(
      d, std::vector<Mat<Scalar>>(d, Mat<Scalar>::Zero(rows, cols)));
  std::vector<TwoSiteBlock<Scalar>> s_acc(
      w2.w_r, TwoSiteBlock<Scalar>(
                  d, std::vector<Mat<Scalar>>(d, Mat<Scalar>::Zero(rows, cols))));
  for (const auto& tr : w2.transitions) {
    for (int s2 = 0; s2 < d; ++s2)
      for (int s2p = 0; s2p < d; ++s2p) {
        if (tr.op(s2, s2p) == Scalar(0)) continue;
        for (int s1 = 0; s1 < d; ++s1)
          s_acc[tr.to][s1][s2] += tr.op(s2, s2p) * q[tr.from][s1][s2p];
      }
  }
  for (std::size_t w = 0; w < s_acc.size(); ++w) {
    if (right[w].size() == 0) continue;
    for (int s1 = 0; s1 < d; ++s1)
      for (int s2 = 0; s2 < d; ++s2)
        out[s1][s2] += s_acc[w][s1][s2] * right[w].transpose();
  }
  return out;
}

struct LocalGroundResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Lowest eigenvector of the effective two-site operator by Lanczos started
/// from theta0 (which must be normalized). theta0 is overwritten with the
/// minimizer.
template <typename Scalar>
LocalGroundResult local_ground(const std::vector<Mat<Scalar>>& left,
                               const typename Mpo<Scalar>::Site& w1,
                               const typename Mpo<Scalar>::Site& w2,
                               const std::vector<Mat<Scalar>>& right,
                               TwoSiteBlock<Scalar>& theta0, double tol,
                               int max_iter) {
  const int d = static_cast<int>(theta0.size());
  const int rows = static_cast<int>(theta0[0][0].rows());
  const int cols = static_cast<int>(theta0[0][0].cols());
  const std::int64_t block = std::int64_t(rows) * cols;
  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  auto pack = [&](const TwoSiteBlock<Scalar>& t) {
    Vec v(d * d * block);
    for (int s1 = 0; s1 < d; ++s1)
      for (int s2 = 0; s2 < d; ++s2)
        v.segment((s1 * d + s2) * block, block) =
            Eigen::Map<const Vec>(t[s1][s2].data(), block);
    return v;
  };
  auto unpack = [&](const Vec& v) {
    TwoSiteBlock<Scalar> t(d, std::vector<Mat<Scalar>>(d));
    for (int s1 = 0; s1 < d; ++s1)
      for (int s2 = 0; s2 < d; ++s2)
        t[s1][s2] = Eigen::Map<const Mat<Scalar>>(
            v.data() + (s1 * d + s2) * block, rows, cols);
    return t;
  };
  auto apply = [&](const Vec& v) {
    return pack(apply_effective<Scalar>(left, w1, w2, right, unpack(v)));
  };
  auto res = lanczos_lowest<Scalar>(apply, pack(theta0), max_iter, tol);
  theta0 = unpack(res.eigenvector);
  return {res.eigenvalue, res.iterations, res.residual_norm};
}

template <typename Scalar>
struct SplitResult {
  SiteTensor<Scalar> a;
  Eigen::VectorXd lambda;
  SiteTensor<Scalar> b;
  double discarded_weight = 0.0;
};

/// Truncated SVD split of a two-site block: keep at most chi_max singular
/// values and none below cutoff relative to the largest; the kept weights
/// are rescaled to preserve the pre-truncation total of lambda^2.
template <typename Scalar>
SplitResult<Scalar> truncate_split(const TwoSiteBlock<Scalar>& theta,
                                   int chi_max, double cutoff) {
  const int d = static_cast<int>(theta.size());
  const int rows = static_cast<int>(theta[0][0].rows());
  const int cols = static_cast<int>(theta[0][0].cols());
  Mat<Scalar> m(d * rows, d * cols);
  for (int s1 = 0; s1 < d; ++s1)
    for (int s2 = 0; s2 < d; ++s2)
      m.block(s1 * rows, s2 * cols, rows, cols) = theta[s1][s2];
  auto svd = detail::thin_svd(m);
  const int rank = static_cast<int>(svd.s.size());
  const double total = svd.s.squaredNorm();
  const double smax = svd.s(0);
  int keep = 0;
  while (keep < rank && keep < chi_max && svd.s(keep) > cutoff * smax) ++keep;
  if (keep == 0) keep = 1;  // never discard everything
  double kept_sq = svd.s.head(keep).squaredNorm();
  SplitResult<Scalar> out;
  out.discarded_weight = total - kept_sq;
  out.lambda = svd.s.head(keep) * std::sqrt(total / kept_sq);
  out.a.resize(d);
  out.b.resize(d);
  for (int s = 0; s < d; ++s) {
    out.a[s] = svd.u.block(s * rows, 0, rows, keep);
    out.b[s] = svd.vh.block(0, s * cols, keep, cols);
  }
  return out;
}

struct DmrgConfig {
  int chi_max = 128;
  int n_sweeps = 8;
  double svd_cutoff = 1e-12;
  double local_tol = 1e-13;
  int local_max_iter = 100;
  double energy_tol = 1e-12;
  std::uint64_t seed = 1234;
  int chi_init = 8;
  // Relative amplitude of the random admixture to the local solver start
  // vector (halved per sweep, off after mix_sweeps). The admixture only
  // widens the Krylov space so the local solve can cross symmetry sectors;
  // the optimized state itself is never perturbed.
  double mix_noise = 0.2;
  int mix_sweeps = 3;
};

template <typename Scalar>
struct DmrgResult {
  double energy = 0.0;
  MixedCanonical<Scalar> state;
  std::vector<double> trace;  // one energy per two-site update
  int sweeps_run = 0;
  double max_discarded_weight = 0.0;
};

/// Alternating two-site sweeps: local Lanczos minimization, truncated split,
/// incremental environment update. Stops after n_sweeps or when a
/// directional sweep improves the energy by less than energy_tol.
///
/// During a sweep the state is A[0..k-1] * center-carrying site * B[k+1..];
/// `carrier` holds the site tensor with the bond weights absorbed.
template <typename Scalar>
DmrgResult<Scalar> dmrg_run(const Mpo<Scalar>& o, const Mps<Scalar>& init,
                            const DmrgConfig& cfg) {
  const int n = o.n_sites();
  if (init.n_sites() != n)
    throw std::invalid_argument("dmrg_run: operator/state size mismatch");
  if (n < 2) throw std::invalid_argument("dmrg_run: need at least two sites");
  const int d = init.phys_dim();

  MixedCanonical<Scalar> mixed = mixed_canonicalize(init, 0);
  const double nrm = mixed.lambda.norm();
  if (!(nrm > 0)) throw std::invalid_argument("dmrg_run: zero initial state");
  mixed.lambda /= nrm;
  std::vector<SiteTensor<Scalar>> a_t(n), b_t = mixed.right;

  Environments<Scalar> env = build_environments(o, mixed, 0);

  // Center-absorbed tensor at site 0: lambda (now 1) times B[0].
  SiteTensor<Scalar> carrier(d);
  for (int s = 0; s < d; ++s)
    carrier[s] = mixed.lambda.template cast<Scalar>().asDiagonal() * b_t[0][s];

  DmrgResult<Scalar> result;
  Eigen::VectorXd last_lambda = mixed.lambda;

  auto normalize_theta = [&](TwoSiteBlock<Scalar>& t) {
    double sq = 0.0;
    for (auto& rowv : t)
      for (auto& mm : rowv) sq += mm.squaredNorm();
    const double s = 1.0 / std::sqrt(sq);
    for (auto& rowv : t)
      for (auto& mm : rowv) mm *= Scalar(s);
  };
  std::mt19937_64 mix_rng(cfg.seed ^ 0xd1b54a32d192ed03ull);
  std::normal_distribution<double> mix_gauss(0.0, 1.0);
  auto mixed_start = [&](const TwoSiteBlock<Scalar>& t, double amplitude) {
    TwoSiteBlock<Scalar> start = t;
    if (amplitude > 0.0) {
      for (auto& rowv : start)
        for (auto& mm : rowv)
          mm += amplitude *
                Mat<Scalar>::NullaryExpr(mm.rows(), mm.cols(),
                                         [&](Eigen::Index, Eigen::Index) {
                                           return Scalar(mix_gauss(mix_rng));
                                         });
      normalize_theta(start);
    }
    return start;
  };

  double sweep_energy = 0.0, prev_sweep_energy = 0.0;
  bool have_prev = false;
  bool ended_rightward = true;

  for (int sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
    const bool rightward = (sweep % 2 == 0);
    const double amplitude =
        sweep < cfg.mix_sweeps ? cfg.mix_noise * std::pow(0.5, sweep) : 0.0;
    if (rightward) {
      // carrier sits at site 0 with B tensors to its right.
      for (int i = 0; i < n - 1; ++i) {
        TwoSiteBlock<Scalar> theta(d, std::vector<Mat<Scalar>>(d));
        for (int s1 = 0; s1 < d; ++s1)
          for (int s2 = 0; s2 < d; ++s2)
            theta[s1][s2] = carrier[s1] * b_t[i + 1][s2];
        normalize_theta(theta);
        theta = mixed_start(theta, amplitude);
        auto lg = local_ground<Scalar>(env.left[i], o.sites[i], o.sites[i + 1],
                                       env.right[i + 2], theta, cfg.local_tol,
                                       cfg.local_max_iter);
        result.trace.push_back(lg.eigenvalue);
        sweep_energy = lg.eigenvalue;
        auto split = truncate_split(theta, cfg.chi_max, cfg.svd_cutoff);
        result.max_discarded_weight =
            std::max(result.max_discarded_weight, split.discarded_weight);
        a_t[i] = split.a;
        b_t[i + 1] = split.b;
        last_lambda = split.lambda;
        env.left[i + 1] =
            detail::advance_left<Scalar>(env.left[i], o.sites[i], a_t[i]);
        for (int s = 0; s < d; ++s)
          carrier[s] =
              split.lambda.template cast<Scalar>().asDiagonal() * b_t[i + 1][s];
      }
      ended_rightward = true;
    } else {
      // carrier sits at site n-1 with A tensors to its left.
      for (int i = n - 2; i >= 0; --i) {
        TwoSiteBlock<Scalar> theta(d, std::vector<Mat<Scalar>>(d));
        for (int s1 = 0; s1 < d; ++s1)
          for (int s2 = 0; s2 < d; ++s2)
            theta[s1][s2] = a_t[i][s1] * carrier[s2];
        normalize_theta(theta);
        theta = mixed_start(theta, amplitude);
        auto lg = local_ground<Scalar>(env.left[i], o.sites[i], o.sites[i + 1],
                                       env.right[i + 2], theta, cfg.local_tol,
                                       cfg.local_max_iter);
        result.trace.push_back(lg.eigenvalue);
        sweep_energy = lg.eigenvalue;
        auto split = truncate_split(theta, cfg.chi_max, cfg.svd_cutoff);
        result.max_discarded_weight =
            std::max(result.max_discarded_weight, split.discarded_weight);
        a_t[i] = split.a;
        b_t[i + 1] = split.b;
        last_lambda = split.lambda;
        env.right[i + 1] = detail::advance_right<Scalar>(
            env.right[i + 2], o.sites[i + 1], b_t[i + 1]);
        for (int s = 0; s < d; ++s)
          carrier[s] = a_t[i][s] * split.lambda.template cast<Scalar>().asDiagonal();
      }
      // Regauge site 0 so the next rightward sweep starts from B tensors.
      auto svd = detail::thin_svd(detail::stack_right(carrier));
      b_t[0] = detail::unstack_right(svd.vh, d);
      const Scalar c0 = svd.u(0, 0) * Scalar(svd.s(0));
      for (int s = 0; s < d; ++s) carrier[s] = c0 * b_t[0][s];
      ended_rightward = false;
    }
    ++result.sweeps_run;
    if (have_prev && sweep + 1 >= cfg.mix_sweeps &&
        std::abs(prev_sweep_energy - sweep_energy) <
            cfg.energy_tol * std::max(1.0, std::abs(sweep_energy)))
      break;
    prev_sweep_energy = sweep_energy;
    have_prev = true;
  }

  result.energy = result.trace.empty() ? 0.0 : result.trace.back();
  mixed.lambda = last_lambda;
  if (ended_rightward) {
    mixed.left.assign(a_t.begin(), a_t.end() - 1);
    mixed.right = {b_t[n - 1]};
    mixed.center = n - 1;
  } else {
    mixed.left = {a_t[0]};
    mixed.right.assign(b_t.begin() + 1, b_t.end());
    mixed.center = 1;
  }
  result.state = mixed;
  return result;
}

/// Convenience: random start with the configured seed and initial bond
/// dimension.
template <typename Scalar>
DmrgResult<Scalar> dmrg_ground_state(const Mpo<Scalar>& o,
                                     const DmrgConfig& cfg) {
  Mps<Scalar> init = random_mps<Scalar>(o.n_sites(), 2,
                                        std::min(cfg.chi_max, cfg.chi_init),
                                        cfg.seed);
  return dmrg_run(o, init, cfg);
}

}  // namespace vqs
