#include "vqs/rbm.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

namespace vqs {

namespace {

// log(2 cosh x), safe against overflow for large |x|.
inline double log2cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

inline Eigen::VectorXd theta_of(const RbmParams& p, const SpinConfig& s) {
  return p.b + p.w * s;
}

}  // namespace

BasisState spin_to_basis(const SpinConfig& s) {
  BasisState b;
  b.n_qubits = static_cast<int>(s.size());
  for (int k = 0; k < b.n_qubits; ++k)
    if (s[k] < 0) b.bits |= std::uint64_t{1} << k;
  return b;
}

SpinConfig basis_to_spin(const BasisState& b) {
  SpinConfig s(b.n_qubits);
  for (int k = 0; k < b.n_qubits; ++k) s[k] = b.bit(k) ? -1.0 : 1.0;
  return s;
}

RbmParams RbmParams::gaussian_init(int n_visible, int alpha,
                                   std::uint64_t seed, double stddev) {
  if (n_visible < 1 || alpha < 1)
    throw std::invalid_argument("rbm: bad shape");
  const int m = alpha * n_visible;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, stddev);
  RbmParams p;
  p.a = Eigen::VectorXd::NullaryExpr(n_visible,
                                     [&](Eigen::Index) { return g(rng); });
  p.b = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return g(rng); });
  p.w = Eigen::MatrixXd::NullaryExpr(
      m, n_visible, [&](Eigen::Index, Eigen::Index) { return g(rng); });
  return p;
}

Eigen::VectorXd RbmParams::to_flat() const {
  Eigen::VectorXd v(n_params());
  v.head(n_visible()) = a;
  v.segment(n_visible(), n_hidden()) = b;
  for (int i = 0; i < n_hidden(); ++i)
    v.segment(n_visible() + n_hidden() + i * n_visible(), n_visible()) =
        w.row(i);
  return v;
}

RbmParams RbmParams::from_flat(int n_visible, int n_hidden,
                               const Eigen::VectorXd& flat) {
  if (flat.size() != n_visible + n_hidden + n_hidden * n_visible)
    throw std::invalid_argument("rbm: flat size mismatch");
  RbmParams p;
  p.a = flat.head(n_visible);
  p.b = flat.segment(n_visible, n_hidden);
  p.w.resize(n_hidden, n_visible);
  for (int i = 0; i < n_hidden; ++i)
    p.w.row(i) =
        flat.segment(n_visible + n_hidden + i * n_visible, n_visible);
  return p;
}

double log_psi(const RbmParams& p, const SpinConfig& s) {
  if (s.size() != p.a.size())
    throw std::invalid_argument("log_psi: dimension mismatch");
  double acc = p.a.dot(s);
  const Eigen::VectorXd theta = theta_of(p, s);
  for (int i = 0; i < theta.size(); ++i) acc += log2cosh(theta[i]);
  return acc;
}

Eigen::VectorXd log_derivatives(const RbmParams& p, const SpinConfig& s) {
  const int n = p.n_visible(), m = p.n_hidden();
  Eigen::VectorXd out(p.n_params());
  const Eigen::VectorXd th = theta_of(p, s).array().tanh();
  out.head(n) = s;
  out.segment(n, m) = th;
  for (int i = 0; i < m; ++i) out.segment(n + m + i * n, n) = th[i] * s;
  return out;
}

double local_energy(const PauliSum& h, const RbmParams& p,
                    const SpinConfig& s) {
  const Eigen::VectorXd theta = theta_of(p, s);
  Eigen::VectorXd lc(theta.size());
  for (int i = 0; i < theta.size(); ++i) lc[i] = log2cosh(theta[i]);
  const BasisState base = spin_to_basis(s);
  cdouble acc = 0.0;
  for (const auto& [bprime, elem] : connected_elements(h, base)) {
    const std::uint64_t flips = base.bits ^ bprime.bits;
    if (flips == 0) {
      acc += elem;
      continue;
    }
    double dlog = 0.0;
    Eigen::VectorXd tp = theta;
    for (int j = 0; j < base.n_qubits; ++j)
      if ((flips >> j) & 1u) {
        dlog += -2.0 * p.a[j] * s[j];
        tp -= 2.0 * s[j] * p.w.col(j);
      }
    for (int i = 0; i < tp.size(); ++i) dlog += log2cosh(tp[i]) - lc[i];
    acc += elem * std::exp(dlog);
  }
  if (std::abs(acc.imag()) > 1e-8 * (1.0 + std::abs(acc.real())))
    throw std::runtime_error("local_energy: non-real accumulation");
  return acc.real() + h.constant();
}

namespace {

/// Markov chain with incrementally maintained hidden-unit activations.
class Chain {
 public:
  Chain(const RbmParams& p, SpinConfig s0, std::uint64_t seed)
      : p_(p), s_(std::move(s0)), rng_(seed), unit_(0.0, 1.0) {
    theta_ = theta_of(p_, s_);
    lc_.resize(theta_.size());
    for (int i = 0; i < theta_.size(); ++i) lc_[i] = log2cosh(theta_[i]);
  }

  const SpinConfig& config() const { return s_; }
  long long accepted() const { return accepted_; }
  long long proposed() const { return proposed_; }

  void sweep(MoveType move) {
    const int n = static_cast<int>(s_.size());
    for (int k = 0; k < n; ++k) {
      if (move == MoveType::SingleFlip) {
        propose({static_cast<int>(rng_() % n)});
      } else {
        int plus = -1, minus = -1;
        if (!pick_pair(plus, minus)) continue;
        propose({plus, minus});
      }
    }
  }

 private:
  bool pick_pair(int& plus, int& minus) {
    const int n = static_cast<int>(s_.size());
    int n_plus = 0;
    for (int j = 0; j < n; ++j) n_plus += s_[j] > 0;
    if (n_plus == 0 || n_plus == n) return false;
    int pi = static_cast<int>(rng_() % n_plus);
    int mi = static_cast<int>(rng_() % (n - n_plus));
    for (int j = 0; j < n; ++j) {
      if (s_[j] > 0 && pi-- == 0) plus = j;
      if (s_[j] < 0 && mi-- == 0) minus = j;
    }
    return true;
  }

  void propose(std::initializer_list<int> flips) {
    ++proposed_;
    double dlog = 0.0;
    tp_ = theta_;
    for (int j : flips) {
      dlog += -2.0 * p_.a[j] * s_[j];
      tp_ -= 2.0 * s_[j] * p_.w.col(j);
    }
    lp_.resize(tp_.size());
    for (int i = 0; i < tp_.size(); ++i) {
      lp_[i] = log2cosh(tp_[i]);
      dlog += lp_[i] - lc_[i];
    }
    if (dlog >= 0.0 || unit_(rng_) < std::exp(2.0 * dlog)) {
      ++accepted_;
      for (int j : flips) s_[j] = -s_[j];
      theta_.swap(tp_);
      lc_.swap(lp_);
    }
  }

  const RbmParams& p_;
  SpinConfig s_;
  Eigen::VectorXd theta_, lc_, tp_, lp_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_;
  long long accepted_ = 0, proposed_ = 0;
};

SpinConfig initial_config(int n, const std::optional<int>& sector,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  SpinConfig s(n);
  if (!sector) {
    for (int j = 0; j < n; ++j) s[j] = (rng() & 1) ? 1.0 : -1.0;
    return s;
  }
  const int m = *sector;
  if (std::abs(m) > n || ((n - m) % 2) != 0)
    throw std::invalid_argument("sample: unattainable sector");
  const int n_plus = (n + m) / 2;
  for (int j = 0; j < n; ++j) s[j] = j < n_plus ? 1.0 : -1.0;
  for (int j = n - 1; j > 0; --j)
    std::swap(s[j], s[static_cast<int>(rng() % (j + 1))]);
  return s;
}

}  // namespace

SampleResult sample(const RbmParams& p, const SamplerConfig& cfg,
                    const std::optional<SpinConfig>& start) {
  if (cfg.sector_total_z && cfg.move != MoveType::ExchangePair)
    throw std::invalid_argument("sample: sector requires ExchangePair moves");
  const int n = p.n_visible();
  SpinConfig s0 =
      start ? *start : initial_config(n, cfg.sector_total_z, cfg.seed);
  if (cfg.sector_total_z && std::lround(s0.sum()) != *cfg.sector_total_z)
    throw std::invalid_argument("sample: start outside the sector");
  Chain chain(p, s0, cfg.seed);
  for (int b = 0; b < cfg.n_burn; ++b) chain.sweep(cfg.move);
  SampleResult out;
  out.samples.reserve(cfg.n_samples);
  for (int k = 0; k < cfg.n_samples; ++k) {
    for (int t = 0; t < cfg.thin; ++t) chain.sweep(cfg.move);
    out.samples.push_back(chain.config());
  }
  out.acceptance_rate =
      chain.proposed() ? double(chain.accepted()) / double(chain.proposed())
                       : 0.0;
  out.final_config = chain.config();
  return out;
}

std::pair<double, double> binned_stats(const std::vector<double>& series,
                                       int n_bins) {
  const int n = static_cast<int>(series.size());
  if (n == 0) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  const int bins = std::min(n_bins, n);
  if (bins < 2) return {mean, 0.0};
  const int per = n / bins;
  std::vector<double> bm(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    for (int k = 0; k < per; ++k) bm[b] += series[n - (bins - b) * per + k];
    bm[b] /= per;
  }
  double bmean = 0.0;
  for (double v : bm) bmean += v;
  bmean /= bins;
  double var = 0.0;
  for (double v : bm) var += (v - bmean) * (v - bmean);
  var /= (bins - 1);
  return {mean, std::sqrt(var / bins)};
}

namespace {

struct Batch {
  Eigen::MatrixXd oc;  // centered, 1/sqrt(weight-sum) scaled rows
  Eigen::VectorXd ec;  // centered, equally scaled local energies
  double energy_mean = 0.0;
  double energy_err = 0.0;
};

Batch accumulate_sampled(const PauliSum& h, const RbmParams& p,
                         const std::vector<SpinConfig>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) throw std::invalid_argument("estimate: no samples");
  Batch batch;
  Eigen::MatrixXd o(n, p.n_params());
  Eigen::VectorXd e(n);
  std::vector<double> series(n);
  for (int k = 0; k < n; ++k) {
    o.row(k) = log_derivatives(p, samples[k]);
    e[k] = local_energy(h, p, samples[k]);
    series[k] = e[k];
  }
  auto [mean, err] = binned_stats(series);
  batch.energy_mean = mean;
  batch.energy_err = err;
  const double scale = 1.0 / std::sqrt(double(n));
  batch.oc = (o.rowwise() - o.colwise().mean()) * scale;
  batch.ec = (e.array() - e.mean()).matrix() * scale;
  return batch;
}

Batch accumulate_exact(const PauliSum& h, const RbmParams& p) {
  const int n = p.n_visible();
  if (n > 12)
    throw std::invalid_argument("exact summation limited to 12 spins");
  const std::int64_t dim = std::int64_t{1} << n;
  Eigen::VectorXd logw(dim);
  std::vector<SpinConfig> configs(dim);
  for (std::int64_t c = 0; c < dim; ++c) {
    configs[c] = basis_to_spin(BasisState{static_cast<std::uint64_t>(c), n});
    logw[c] = 2.0 * log_psi(p, configs[c]);
  }
  const double shift = logw.maxCoeff();
  Eigen::VectorXd wgt = (logw.array() - shift).exp();
  wgt /= wgt.sum();

  Batch batch;
  Eigen::MatrixXd o(dim, p.n_params());
  Eigen::VectorXd e(dim);
  for (std::int64_t c = 0; c < dim; ++c) {
    o.row(c) = log_derivatives(p, configs[c]);
    e[c] = local_energy(h, p, configs[c]);
  }
  batch.energy_mean = wgt.dot(e);
  batch.energy_err = 0.0;
  const Eigen::RowVectorXd psi_mean = wgt.transpose() * o;
  batch.oc = wgt.cwiseSqrt().asDiagonal() * (o.rowwise() - psi_mean);
  batch.ec = wgt.cwiseSqrt().asDiagonal() *
             (e.array() - batch.energy_mean).matrix();
  return batch;
}

/// SR displacement; the Woodbury form used when there are fewer rows than
/// parameters is algebraically identical to solving (S + lambda I) dense.
Eigen::VectorXd sr_displacement(const Batch& b, const SrConfig& cfg) {
  const Eigen::VectorXd f = 2.0 * (b.oc.transpose() * b.ec);
  if (cfg.mode == SrMode::PlainGradient) return -cfg.eta * f;
  const Eigen::Index rows = b.oc.rows(), p = b.oc.cols();
  if (rows < p) {
    Eigen::MatrixXd g = b.oc * b.oc.transpose();
    g.diagonal().array() += cfg.lambda_reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    const Eigen::VectorXd y = ldlt.solve(b.oc * f);
    if (ldlt.info() != Eigen::Success || !y.allFinite()) {
      std::clog << "sr_update: regularized solve failed, falling back to "
                   "plain gradient\n";
      return -cfg.eta * f;
    }
    return -(cfg.eta / cfg.lambda_reg) * (f - b.oc.transpose() * y);
  }
  Eigen::MatrixXd s = b.oc.transpose() * b.oc;
  s.diagonal().array() += cfg.lambda_reg;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  const Eigen::VectorXd d = ldlt.solve(-cfg.eta * f);
  if (ldlt.info() != Eigen::Success || !d.allFinite()) {
    std::clog << "sr_update: regularized solve failed, falling back to "
                 "plain gradient\n";
    return -cfg.eta * f;
  }
  return d;
}

}  // namespace

namespace {

EstimateResult materialize(const Batch& b) {
  EstimateResult out;
  out.energy_mean = b.energy_mean;
  out.energy_err = b.energy_err;
  out.f = 2.0 * (b.oc.transpose() * b.ec);
  out.s_matrix = b.oc.transpose() * b.oc;
  return out;
}

}  // namespace

EstimateResult estimate_step(const PauliSum& h, const RbmParams& p,
                             const std::vector<SpinConfig>& samples) {
  return materialize(accumulate_sampled(h, p, samples));
}

EstimateResult estimate_exact(const PauliSum& h, const RbmParams& p) {
  return materialize(accumulate_exact(h, p));
}

RbmParams sr_update(const RbmParams& p, const Eigen::VectorXd& f,
                    const Eigen::MatrixXd& s_matrix, const SrConfig& cfg) {
  Eigen::VectorXd delta;
  if (cfg.mode == SrMode::PlainGradient) {
    delta = -cfg.eta * f;
  } else {
    Eigen::MatrixXd s = s_matrix;
    s.diagonal().array() += cfg.lambda_reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
    delta = ldlt.solve(-cfg.eta * f);
    if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
      std::clog << "sr_update: regularized solve failed, falling back to "
                   "plain gradient\n";
      delta = -cfg.eta * f;
    }
  }
  return RbmParams::from_flat(p.n_visible(), p.n_hidden(),
                              p.to_flat() + delta);
}

VmcResult vmc_run(const PauliSum& h, const RbmParams& init,
                  const SamplerConfig& sampler, const SrConfig& sr,
                  VmcEstimator estimator) {
  if (h.n_qubits() != init.n_visible())
    throw std::invalid_argument("vmc_run: dimension mismatch");
  VmcResult out;
  out.params = init;
  std::optional<SpinConfig> chain_state;
  SamplerConfig cfg = sampler;

  for (int iter = 0; iter < sr.n_iters; ++iter) {
    Batch batch;
    double acceptance = 1.0;
    if (estimator == VmcEstimator::Sampled) {
      auto res = sample(out.params, cfg, chain_state);
      chain_state = res.final_config;
      cfg.n_burn = 0;  // the chain persists across iterations
      cfg.seed = sampler.seed + 0x51ed2701ull * (iter + 1);
      acceptance = res.acceptance_rate;
      batch = accumulate_sampled(h, out.params, res.samples);
    } else {
      batch = accumulate_exact(h, out.params);
    }
    const Eigen::VectorXd f = 2.0 * (batch.oc.transpose() * batch.ec);
    const Eigen::VectorXd delta = sr_displacement(batch, sr);
    out.trace.push_back(
        {iter, batch.energy_mean, batch.energy_err, acceptance, f.norm()});
    out.params = RbmParams::from_flat(init.n_visible(), init.n_hidden(),
                                      out.params.to_flat() + delta);
  }

  const int total = static_cast<int>(out.trace.size());
  const int window = std::max(1, total / 4);
  std::vector<double> tail;
  tail.reserve(window);
  for (int k = total - window; k < total; ++k)
    tail.push_back(out.trace[k].energy_mean);
  auto [mean, err] = binned_stats(tail);
  out.reported_energy = mean;
  out.reported_err = err;
  return out;
}

void save_rbm(std::ostream& out, const RbmParams& p) {
  out.precision(17);
  out << "vqs-rbm 1\n" << p.n_visible() << " " << p.n_hidden() << "\n";
  const Eigen::VectorXd flat = p.to_flat();
  for (int k = 0; k < flat.size(); ++k) out << flat[k] << "\n";
}

RbmParams load_rbm(std::istream& in) {
  std::string magic;
  int version = 0, n = 0, m = 0;
  in >> magic >> version >> n >> m;
  if (magic != "vqs-rbm" || version != 1)
    throw std::runtime_error("load_rbm: unrecognized checkpoint header");
  Eigen::VectorXd flat(n + m + m * n);
  for (int k = 0; k < flat.size(); ++k) in >> flat[k];
  if (!in) throw std::runtime_error("load_rbm: truncated checkpoint");
  return RbmParams::from_flat(n, m, flat);
}

}  // namespace vqs
