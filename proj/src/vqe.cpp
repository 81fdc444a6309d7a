#include "vqs/vqe.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace vqs {

namespace {

std::vector<std::pair<int, int>> singlet_pairs(int n_qubits,
                                               SingletLayout layout) {
  std::vector<std::pair<int, int>> pairs;
  if (layout == SingletLayout::AdjacentPairs) {
    if (n_qubits < 2 || n_qubits % 2 != 0)
      throw std::invalid_argument("initial_singlet_state: need even qubits");
    for (int i = 0; i + 1 < n_qubits; i += 2) pairs.push_back({i, i + 1});
  } else {
    if (n_qubits < 4 || n_qubits % 4 != 0)
      throw std::invalid_argument(
          "initial_singlet_state: ladder needs a multiple of 4 qubits");
    const int n = n_qubits / 2;  // sites per leg
    for (int sigma = 0; sigma < 2; ++sigma)
      for (int j = 0; j + 1 < n; j += 2)
        pairs.push_back({n * sigma + j, n * sigma + j + 1});
  }
  return pairs;
}

// In-place v <- cos(phi) v - i sin(phi) P v for one Pauli string (unit
// coefficient handled by the caller via phi).
void apply_term_exponential(Eigen::VectorXcd& v, const PauliString& t,
                            double phi, Eigen::VectorXcd& scratch) {
  if (phi == 0.0) return;
  const cdouble c = std::cos(phi);
  const cdouble mis = cdouble(0.0, -std::sin(phi));
  const std::uint64_t flip = t.flip_mask();
  const std::uint64_t pm = t.phase_mask();
  cdouble base(1.0, 0.0);
  switch (std::popcount(t.y_mask()) & 3) {
    case 1: base = cdouble(0.0, 1.0); break;
    case 2: base = -1.0; break;
    case 3: base = cdouble(0.0, -1.0); break;
    default: break;
  }
  const std::int64_t dim = v.size();
  if (flip == 0) {
    for (std::int64_t s = 0; s < dim; ++s) {
      const cdouble e =
          std::popcount(static_cast<std::uint64_t>(s) & pm) & 1 ? -base : base;
      v[s] *= c + mis * e;
    }
    return;
  }
  scratch.resize(dim);
  for (std::int64_t s = 0; s < dim; ++s) {
    const cdouble e =
        std::popcount(static_cast<std::uint64_t>(s) & pm) & 1 ? -base : base;
    scratch[static_cast<std::int64_t>(static_cast<std::uint64_t>(s) ^ flip)] =
        e * v[s];
  }
  v = c * v + mis * scratch;
}

}  // namespace

StateVector initial_singlet_state(int n_qubits, SingletLayout layout) {
  const auto pairs = singlet_pairs(n_qubits, layout);
  StateVector v = StateVector::zero(n_qubits);
  const int np = static_cast<int>(pairs.size());
  const double amp = std::pow(1.0 / std::sqrt(2.0), np);
  for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << np); ++sel) {
    std::uint64_t bits = 0;
    int sign = 1;
    for (int k = 0; k < np; ++k) {
      if ((sel >> k) & 1u) {
        bits |= std::uint64_t{1} << pairs[k].first;  // |10>: minus sign
        sign = -sign;
      } else {
        bits |= std::uint64_t{1} << pairs[k].second;  // |01>
      }
    }
    v.amplitudes[static_cast<std::int64_t>(bits)] = sign * amp;
  }
  return v;
}

StateVector apply_group_exponential(const StateVector& v, const TermGroup& g,
                                    double angle) {
  if (g.terms.n_qubits() != v.n_qubits)
    throw std::invalid_argument("apply_group_exponential: dimension mismatch");
  StateVector out = v;
  Eigen::VectorXcd scratch;
  for (const auto& t : g.terms.terms()) {
    const double c = t.coefficient().real() / g.generator_scale;
    apply_term_exponential(out.amplitudes, t, angle * c, scratch);
  }
  return out;
}

StateVector apply_group_exponential(const StateVector& v,
                                    const PauliSum& group, double angle) {
  TermGroup g{"", group, 1.0};
  return apply_group_exponential(v, g, angle);
}

StateVector ansatz_state(const TermGroups& groups, const AnsatzParams& params,
                         const StateVector& psi0) {
  const int n_groups = static_cast<int>(groups.groups.size());
  if (params.theta.size() != std::int64_t(params.n_layers) * n_groups)
    throw std::invalid_argument("ansatz_state: parameter count mismatch");
  StateVector v = psi0;
  Eigen::VectorXcd scratch;
  for (int layer = 0; layer < params.n_layers; ++layer)
    for (int gi = 0; gi < n_groups; ++gi) {
      const auto& g = groups.groups[gi];
      const double angle = params.theta[layer * n_groups + gi];
      for (const auto& t : g.terms.terms())
        apply_term_exponential(
            v.amplitudes, t,
            angle * t.coefficient().real() / g.generator_scale, scratch);
    }
  return v;
}

namespace {

void apply_gate_inverse(StateVector& v, const TermGroup& g, double angle,
                        Eigen::VectorXcd& scratch) {
  for (const auto& t : g.terms.terms())
    apply_term_exponential(v.amplitudes, t,
                           -angle * t.coefficient().real() / g.generator_scale,
                           scratch);
}

/// A_g |v>: the group generator applied matrix-free.
StateVector apply_generator(const TermGroup& g, const StateVector& v) {
  PauliSum scaled = g.terms;
  scaled *= 1.0 / g.generator_scale;
  return matvec(scaled, v);
}

}  // namespace

Eigen::VectorXd vqe_gradient(const TermGroups& groups,
                             const AnsatzParams& params,
                             const StateVector& psi0, const PauliSum& h,
                             GradMode mode) {
  const int n_groups = static_cast<int>(groups.groups.size());
  const int m = params.n_layers * n_groups;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
  if (mode == GradMode::FiniteDiff) {
    const double step = 1e-6;
    AnsatzParams probe = params;
    for (int k = 0; k < m; ++k) {
      probe.theta[k] = params.theta[k] + step;
      const double ep = expectation(h, ansatz_state(groups, probe, psi0));
      probe.theta[k] = params.theta[k] - step;
      const double em = expectation(h, ansatz_state(groups, probe, psi0));
      probe.theta[k] = params.theta[k];
      grad[k] = (ep - em) / (2.0 * step);
    }
    return grad;
  }
  // Reverse sweep: w_g = (gates 1..g)|psi0>, y_g = (gates g+1..m)^dag H U|psi0>;
  // dL/dtheta_g = -2 Im <w_g | A_g | y_g>.
  StateVector w = ansatz_state(groups, params, psi0);
  StateVector y = matvec(h, w);
  Eigen::VectorXcd scratch;
  for (int gate = m - 1; gate >= 0; --gate) {
    const int gi = gate % n_groups;
    const auto& g = groups.groups[gi];
    const StateVector ay = apply_generator(g, y);
    grad[gate] = -2.0 * w.amplitudes.dot(ay.amplitudes).imag();
    if (gate > 0) {
      apply_gate_inverse(w, g, params.theta[gate], scratch);
      apply_gate_inverse(y, g, params.theta[gate], scratch);
    }
  }
  return grad;
}

VqeResult vqe_run(const PauliSum& h, const TermGroups& groups,
                  const StateVector& psi0, int n_layers,
                  const VqeConfig& cfg) {
  const int n_groups = static_cast<int>(groups.groups.size());
  VqeResult out;
  out.params.n_layers = n_layers;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-cfg.init_scale, cfg.init_scale);
  out.params.theta = Eigen::VectorXd::NullaryExpr(
      std::int64_t(n_layers) * n_groups, [&](Eigen::Index) { return u(rng); });

  for (int iter = 0; iter < cfg.n_iters; ++iter) {
    const StateVector w = ansatz_state(groups, out.params, psi0);
    const double energy = expectation(h, w);
    if (!std::isfinite(energy) || energy > std::abs(h.constant()) + 1e3)
      throw std::runtime_error("vqe_run: energy diverged at iteration " +
                               std::to_string(iter));
    const Eigen::VectorXd grad =
        vqe_gradient(groups, out.params, psi0, h, cfg.grad_mode);
    out.trace.push_back({iter, energy, grad.norm()});
    out.params.theta -= cfg.eta * grad;
  }

  const int total = static_cast<int>(out.trace.size());
  const int window = std::min(std::max(cfg.report_window, 1), total);
  double mean = 0.0;
  for (int k = total - window; k < total; ++k) mean += out.trace[k].energy;
  mean /= window;
  double var = 0.0;
  for (int k = total - window; k < total; ++k) {
    const double d = out.trace[k].energy - mean;
    var += d * d;
  }
  out.reported_energy = mean;
  out.reported_std = window > 1 ? std::sqrt(var / (window - 1)) : 0.0;
  return out;
}

void save_ansatz(std::ostream& out, const AnsatzParams& p) {
  out.precision(17);
  out << "vqs-ansatz 1\n" << p.n_layers << " " << p.theta.size() << "\n";
  for (int k = 0; k < p.theta.size(); ++k) out << p.theta[k] << "\n";
}

AnsatzParams load_ansatz(std::istream& in) {
  std::string magic;
  int version = 0, layers = 0;
  std::int64_t len = 0;
  in >> magic >> version >> layers >> len;
  if (magic != "vqs-ansatz" || version != 1)
    throw std::runtime_error("load_ansatz: unrecognized checkpoint header");
  AnsatzParams p;
  p.n_layers = layers;
  p.theta.resize(len);
  for (std::int64_t k = 0; k < len; ++k) in >> p.theta[k];
  if (!in) throw std::runtime_error("load_ansatz: truncated checkpoint");
  return p;
}

}  // namespace vqs
