#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vqs/pauli.hpp"

namespace vqs {

/// Symmetry sector of the computational basis. Each constraint fixes the sum
/// of Z eigenvalues over a subset of qubits; TotalZ is the single-constraint
/// case over all qubits, PairZ a list of such constraints on disjoint
/// subsets (for the Hubbard chain: one per spin leg).
struct SectorSpec {
  struct ZSumConstraint {
    std::vector<int> qubits;
    int target = 0;  // sum of Z eigenvalues (+1/-1 per qubit)
  };
  std::vector<ZSumConstraint> constraints;

  static SectorSpec none() { return {}; }
  static SectorSpec total_z(int n_qubits, int target);
  /// One TotalZ constraint per qubit subset.
  static SectorSpec z_sums(std::vector<ZSumConstraint> cs) {
    return {std::move(cs)};
  }

  bool empty() const { return constraints.empty(); }
  bool contains(std::uint64_t bits) const;
};

/// Ordered full-space basis indices of a sector plus the inverse lookup
/// (full index -> sector position, -1 outside). Throws on an empty sector.
struct SectorBasis {
  std::vector<std::uint64_t> states;
  std::vector<std::int32_t> position;  // size 2^n
  int n_qubits = 0;

  std::size_t dim() const { return states.size(); }
};

SectorBasis sector_basis(int n_qubits, const SectorSpec& sector);

struct EigenResult {
  double energy = 0.0;
  StateVector vector;  // full-space amplitudes, normalized
  double residual_norm = 0.0;
  int iterations = 0;
};

struct GroundStateOptions {
  double tol = 1e-12;
  int max_iter = 500;
  std::uint64_t seed = 1;
};

/// Lowest eigenpair of h by Lanczos with full reorthogonalization, on the
/// full 2^n space or restricted to a symmetry sector. The sector must be
/// preserved by h: every connected element of every sector state is checked
/// to stay inside (tolerance 1e-12), otherwise a precondition error is
/// thrown. Fails explicitly if the residual has not reached tol within
/// max_iter iterations.
EigenResult ground_state(const PauliSum& h, const SectorSpec& sector,
                         const GroundStateOptions& opts = {});

/// Full dense spectrum oracle for small systems (n <= 10).
Eigen::VectorXd dense_spectrum(const PauliSum& h);

}  // namespace vqs
