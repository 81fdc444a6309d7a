#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vqs/models.hpp"
#include "vqs/pauli.hpp"

namespace vqs {

/// Layered angles of the Hamiltonian variational ansatz: one angle per
/// (layer, group) pair, ordered layer-major following the group order of
/// the TermGroups.
struct AnsatzParams {
  int n_layers = 0;
  Eigen::VectorXd theta;  // length n_layers * n_groups
};

enum class GradMode { Adjoint, FiniteDiff };

struct VqeConfig {
  double eta = 0.01;
  int n_iters = 2000;
  GradMode grad_mode = GradMode::Adjoint;
  std::uint64_t seed = 1;
  int report_window = 500;
  double init_scale = 0.01;  // uniform initial angles in [-scale, scale]
};

enum class SingletLayout { Ladder, AdjacentPairs };

/// Product of two-qubit singlets (|01> - |10>)/sqrt(2): on the even
/// horizontal bonds of each ladder leg, or on adjacent pairs (2i, 2i+1).
StateVector initial_singlet_state(int n_qubits, SingletLayout layout);

/// exp(-i angle * sum_t (c_t/scale) P_t) |v> for an internally commuting
/// group, applied term by term via exp(-i phi P) = cos(phi) - i sin(phi) P.
StateVector apply_group_exponential(const StateVector& v, const TermGroup& g,
                                    double angle);

/// The spec'd raw form without generator rescaling.
StateVector apply_group_exponential(const StateVector& v,
                                    const PauliSum& group, double angle);

/// Layered circuit: groups applied in their stored order, repeated
/// n_layers times.
StateVector ansatz_state(const TermGroups& groups, const AnsatzParams& params,
                         const StateVector& psi0);

/// dL/dtheta for L = <psi(theta)|h|psi(theta)>. Adjoint mode runs one
/// forward and one reverse sweep; FiniteDiff uses central differences with
/// step 1e-6.
Eigen::VectorXd vqe_gradient(const TermGroups& groups,
                             const AnsatzParams& params,
                             const StateVector& psi0, const PauliSum& h,
                             GradMode mode);

struct VqeTraceRow {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

struct VqeResult {
  std::vector<VqeTraceRow> trace;
  AnsatzParams params;
  double reported_energy = 0.0;  // mean over the trailing window
  double reported_std = 0.0;     // plain standard deviation over the window
};

/// Plain gradient descent theta <- theta - eta * grad from a seeded
/// near-zero start. Aborts with a diagnostic if the energy diverges.
VqeResult vqe_run(const PauliSum& h, const TermGroups& groups,
                  const StateVector& psi0, int n_layers,
                  const VqeConfig& cfg);

void save_ansatz(std::ostream& out, const AnsatzParams& p);
AnsatzParams load_ansatz(std::istream& in);

}  // namespace vqs
