#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vqs/exact_diag.hpp"
#include "vqs/pauli.hpp"

namespace vqs {

/// Spin configuration with entries in {-1, +1}; s = +1 maps to bit 0 of the
/// computational basis.
using SpinConfig = Eigen::VectorXd;

BasisState spin_to_basis(const SpinConfig& s);
SpinConfig basis_to_spin(const BasisState& b);

/// Restricted-Boltzmann-machine wavefunction
/// psi(s) = exp(sum_j a_j s_j) prod_i 2 cosh(b_i + sum_j W_ij s_j),
/// real parameters, hence a strictly positive amplitude.
struct RbmParams {
  Eigen::VectorXd a;  // visible biases, length N
  Eigen::VectorXd b;  // hidden biases, length M
  Eigen::MatrixXd w;  // weights, M x N

  int n_visible() const { return static_cast<int>(a.size()); }
  int n_hidden() const { return static_cast<int>(b.size()); }
  int n_params() const {
    return n_visible() + n_hidden() + n_hidden() * n_visible();
  }

  /// alpha = M/N must be a positive integer ratio; entries drawn from a
  /// seeded Gaussian of the given standard deviation.
  static RbmParams gaussian_init(int n_visible, int alpha, std::uint64_t seed,
                                 double stddev = 0.01);

  /// Flat layout: a block, b block, W row-major.
  Eigen::VectorXd to_flat() const;
  static RbmParams from_flat(int n_visible, int n_hidden,
                             const Eigen::VectorXd& flat);
};

/// log psi(s); overflow-safe via log 2cosh(x) = |x| + log1p(exp(-2|x|)).
double log_psi(const RbmParams& p, const SpinConfig& s);

/// Analytic log-derivatives in the flat parameter layout:
/// d/da_j = s_j, d/db_i = tanh(theta_i), d/dW_ij = tanh(theta_i) s_j.
Eigen::VectorXd log_derivatives(const RbmParams& p, const SpinConfig& s);

/// E_loc(s) = sum_{s'} <s|H|s'> psi(s')/psi(s) + constant. Throws if the
/// accumulated value has an imaginary part above 1e-8 in magnitude.
double local_energy(const PauliSum& h, const RbmParams& p,
                    const SpinConfig& s);

enum class MoveType { SingleFlip, ExchangePair };

struct SamplerConfig {
  int n_samples = 100;
  int n_burn = 1000;  // sweeps before the first kept sample
  int thin = 1;       // sweeps between kept samples
  MoveType move = MoveType::SingleFlip;
  std::uint64_t seed = 1;
  std::optional<int> sector_total_z;  // requires ExchangePair
};

struct SampleResult {
  std::vector<SpinConfig> samples;
  double acceptance_rate = 0.0;
  SpinConfig final_config;
};

/// Metropolis chain over |psi|^2; one sweep is N proposals. Deterministic
/// for a fixed seed. With a sector, moves swap a uniformly chosen (+1,-1)
/// pair so the total Z is invariant.
SampleResult sample(const RbmParams& p, const SamplerConfig& cfg,
                    const std::optional<SpinConfig>& start = std::nullopt);

struct EstimateResult {
  double energy_mean = 0.0;
  double energy_err = 0.0;
  Eigen::VectorXd f;        // gradient, length n_params
  Eigen::MatrixXd s_matrix; // covariance of log-derivatives
};

/// Monte Carlo estimates of the energy, its binned error, the gradient
/// f_k = 2[<E_loc Psi_k> - <E_loc><Psi_k>] and the covariance matrix
/// S = <Psi Psi^T> - <Psi><Psi^T>.
EstimateResult estimate_step(const PauliSum& h, const RbmParams& p,
                             const std::vector<SpinConfig>& samples);

/// Same quantities from a deterministic weighted sum over all 2^N
/// configurations (N <= 12); energy_err is exactly zero.
EstimateResult estimate_exact(const PauliSum& h, const RbmParams& p);

enum class SrMode { SR, PlainGradient };

struct SrConfig {
  double eta = 0.02;
  double lambda_reg = 1e-3;
  int n_iters = 1000;
  SrMode mode = SrMode::SR;
};

/// One parameter update: SR solves (S + lambda I) dtheta = -eta f; plain
/// gradient descent applies theta -= eta f. A failed solve falls back to
/// the plain gradient step with a logged warning.
RbmParams sr_update(const RbmParams& p, const Eigen::VectorXd& f,
                    const Eigen::MatrixXd& s_matrix, const SrConfig& cfg);

enum class VmcEstimator { Sampled, ExactSum };

struct VmcTraceRow {
  int iter = 0;
  double energy_mean = 0.0;
  double energy_err = 0.0;
  double acceptance_rate = 0.0;
  double grad_norm = 0.0;
};

struct VmcResult {
  std::vector<VmcTraceRow> trace;
  RbmParams params;
  double reported_energy = 0.0;  // mean over the trailing window
  double reported_err = 0.0;     // binned error over the trailing window
};

/// Optimization loop: per iteration draw samples (the chain persists across
/// iterations), estimate energy and gradient, apply the SR update. The
/// reported energy averages the trailing quarter of the iteration energies.
/// The ExactSum estimator replaces sampling by a weighted sum over all 2^N
/// configurations (N <= 12) and is fully deterministic.
VmcResult vmc_run(const PauliSum& h, const RbmParams& init,
                  const SamplerConfig& sampler, const SrConfig& sr,
                  VmcEstimator estimator = VmcEstimator::Sampled);

/// Mean and binned error (20 bins) of a series.
std::pair<double, double> binned_stats(const std::vector<double>& series,
                                       int n_bins = 20);

/// Versioned text checkpoints, 17 significant digits.
void save_rbm(std::ostream& out, const RbmParams& p);
RbmParams load_rbm(std::istream& in);

}  // namespace vqs
