#include "vqs/exact_diag.hpp"

#include <bit>
#include <map>
#include <random>
#include <stdexcept>

#include "vqs/lanczos.hpp"

namespace vqs {

SectorSpec SectorSpec::total_z(int n_qubits, int target) {
  ZSumConstraint c;
  c.qubits.resize(n_qubits);
  for (int k = 0; k < n_qubits; ++k) c.qubits[k] = k;
  c.target = target;
  return {{c}};
}

bool SectorSpec::contains(std::uint64_t bits) const {
  for (const auto& c : constraints) {
    int sum = 0;
    for (int q : c.qubits) sum += ((bits >> q) & 1u) ? -1 : +1;
    if (sum != c.target) return false;
  }
  return true;
}

SectorBasis sector_basis(int n_qubits, const SectorSpec& sector) {
  for (const auto& c : sector.constraints) {
    const int n = static_cast<int>(c.qubits.size());
    if (std::abs(c.target) > n || ((n - c.target) % 2) != 0)
      throw std::invalid_argument("sector_basis: unattainable Z sum");
  }
  SectorBasis b;
  b.n_qubits = n_qubits;
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  b.position.assign(dim, -1);
  for (std::uint64_t s = 0; s < dim; ++s) {
    if (!sector.contains(s)) continue;
    b.position[s] = static_cast<std::int32_t>(b.states.size());
    b.states.push_back(s);
  }
  if (b.states.empty()) throw std::invalid_argument("sector_basis: empty sector");
  return b;
}

namespace {

// Per-term action data for the scatter form out[s'^flip] += elem(s') v[s'].
struct TermAction {
  std::uint64_t flip, phase_mask;
  cdouble base;
};

std::vector<TermAction> term_actions(const PauliSum& h) {
  std::vector<TermAction> acts;
  acts.reserve(h.n_terms());
  for (const auto& t : h.terms()) {
    cdouble base = t.coefficient();
    switch (std::popcount(t.y_mask()) & 3) {
      case 1: base *= cdouble{0.0, 1.0}; break;
      case 2: base *= -1.0; break;
      case 3: base *= cdouble{0.0, -1.0}; break;
      default: break;
    }
    acts.push_back({t.flip_mask(), t.phase_mask(), base});
  }
  return acts;
}

}  // namespace

EigenResult ground_state(const PauliSum& h, const SectorSpec& sector,
                         const GroundStateOptions& opts) {
  const int n = h.n_qubits();
  const auto acts = term_actions(h);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  EigenResult out;
  if (sector.empty()) {
    const std::int64_t dim = std::int64_t{1} << n;
    auto apply = [&](const Eigen::VectorXcd& v) {
      Eigen::VectorXcd w = h.constant() * v;
      for (const auto& a : acts) {
        for (std::int64_t s = 0; s < dim; ++s) {
          const cdouble e =
              (std::popcount(static_cast<std::uint64_t>(s) & a.phase_mask) & 1)
                  ? -a.base
                  : a.base;
          w[static_cast<std::int64_t>(static_cast<std::uint64_t>(s) ^
                                      a.flip)] += e * v[s];
        }
      }
      return w;
    };
    Eigen::VectorXcd start(dim);
    for (std::int64_t i = 0; i < dim; ++i) start[i] = unit(rng);
    auto res = lanczos_lowest<cdouble>(apply, start, opts.max_iter, opts.tol);
    if (!res.converged)
      throw std::runtime_error(
          "ground_state: Lanczos did not converge, best residual " +
          std::to_string(res.residual_norm));
    out.energy = res.eigenvalue;
    out.vector = StateVector(n, std::move(res.eigenvector));
    out.residual_norm = res.residual_norm;
    out.iterations = res.iterations;
    return out;
  }

  const SectorBasis basis = sector_basis(n, sector);
  const std::size_t dim = basis.dim();
  // The sector must be invariant: the summed matrix element to any state
  // outside the sector has to vanish (individual terms may leak as long as
  // they cancel, e.g. XX against YY on an aligned pair).
  for (std::uint64_t s : basis.states) {
    std::map<std::uint64_t, cdouble> leak;
    for (const auto& a : acts) {
      const std::uint64_t tgt = s ^ a.flip;
      if (basis.position[tgt] >= 0) continue;
      const cdouble e =
          (std::popcount(s & a.phase_mask) & 1) ? -a.base : a.base;
      leak[tgt] += e;
    }
    for (const auto& [tgt, e] : leak)
      if (std::abs(e) > 1e-12)
        throw std::invalid_argument(
            "ground_state: Hamiltonian does not preserve the sector");
  }
  auto apply = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd w = h.constant() * v;
    for (const auto& a : acts) {
      for (std::size_t i = 0; i < dim; ++i) {
        const std::uint64_t src = basis.states[i];
        const std::int32_t pos = basis.position[src ^ a.flip];
        if (pos < 0) continue;  // cancels in the sum by the check above
        const cdouble e =
            (std::popcount(src & a.phase_mask) & 1) ? -a.base : a.base;
        w[pos] += e * v[static_cast<std::int64_t>(i)];
      }
    }
    return w;
  };
  Eigen::VectorXcd start(static_cast<std::int64_t>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    start[static_cast<std::int64_t>(i)] = unit(rng);
  auto res = lanczos_lowest<cdouble>(apply, start, opts.max_iter, opts.tol);
  if (!res.converged)
    throw std::runtime_error(
        "ground_state: Lanczos did not converge, best residual " +
        std::to_string(res.residual_norm));
  out.energy = res.eigenvalue;
  out.vector = StateVector::zero(n);
  for (std::size_t i = 0; i < dim; ++i)
    out.vector.amplitudes[static_cast<std::int64_t>(basis.states[i])] =
        res.eigenvector[static_cast<std::int64_t>(i)];
  out.residual_norm = res.residual_norm;
  out.iterations = res.iterations;
  return out;
}

Eigen::VectorXd dense_spectrum(const PauliSum& h) {
  const Eigen::MatrixXcd m = to_dense(h, 10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  return es.eigenvalues();
}

}  // namespace vqs
