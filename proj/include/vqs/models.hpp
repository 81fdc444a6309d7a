#pragma once

#include <array>
#include <string>
#include <vector>

#include "vqs/pauli.hpp"

namespace vqs {

/// Qubit ordering of the spinful chain after the Jordan-Wigner map.
/// Snake: qubit k = N*sigma + j (all up-spins first, then all down-spins).
/// Interleaved: qubit k = 2j + sigma (site-major).
enum class HubbardOrdering { Snake, Interleaved };

/// Raw keeps the Hamiltonian in units of the hopping t; PerSiteOverT divides
/// by t*N so the ground energy is directly the tabulated E0/(tN).
enum class HubbardNormalization { Raw, PerSiteOverT };

struct HubbardParams {
  int n_sites = 2;  // N, number of lattice sites (2N qubits)
  double t = 1.0;
  double u = 0.0;
  HubbardOrdering ordering = HubbardOrdering::Snake;
  HubbardNormalization normalization = HubbardNormalization::PerSiteOverT;
};

struct SchwingerParams {
  int n_sites = 2;   // N, must be even
  double x = 1.0;    // 1/(g a)^2
  double mu = 0.0;   // 2m/(g^2 a)
  double ell = 0.0;  // boundary electric field on the leftmost link
};

/// Two-leg spin ladder with uniform per-direction couplings; qubit
/// k = N*sigma + j as in the snake Hubbard ordering.
struct LadderParams {
  int n_sites = 2;                          // N per leg, must be even
  std::array<double, 3> c_h = {0, 0, 0};    // C^h_{X,Y,Z} on (j, j+1) bonds
  std::array<double, 3> c_v = {0, 0, 0};    // C^v_{X,Y,Z} on (j,up)-(j,down)
};

/// Ordered commuting groups of Hamiltonian terms; the order defines both the
/// ansatz circuit and the layout of the angle vector. `generator_scale` is
/// the factor pulled out of the group so the exponential argument stays
/// O(angle); the stored PauliSum keeps the terms' true coefficients.
struct TermGroup {
  std::string label;
  PauliSum terms;
  double generator_scale = 1.0;
};

struct TermGroups {
  int n_qubits = 0;
  double constant = 0.0;  // identity offset of the full Hamiltonian
  std::vector<TermGroup> groups;

  /// Reassembled full Hamiltonian (partition check lives in tests).
  PauliSum total() const;
};

/// Spin-1/2 Fermi-Hubbard chain at half filling (open boundary), 2N qubits.
PauliSum hubbard_hamiltonian(const HubbardParams& p);

/// Lattice Schwinger Hamiltonian with gauge links eliminated; the squared
/// electric field is expanded into identity, Z and ZZ strings.
PauliSum schwinger_hamiltonian(const SchwingerParams& p);

/// General XYZ ladder Hamiltonian on 2N qubits.
PauliSum ladder_hamiltonian(const LadderParams& p);

/// Transverse-field Ising chain -J sum X_i X_{i+1} - g sum Z_i.
PauliSum ising_example_hamiltonian(int n, double j_coupling, double g_field);

/// Even/odd bond splitting of the ladder Hamiltonian into the 12 mutually
/// commuting groups, in circuit order: h-even X,Y,Z; h-odd Z,Y,X; v-even
/// X,Y,Z; v-odd Z,Y,X.
TermGroups hva_term_groups(const LadderParams& p);

/// Commuting groups for the Schwinger model: XX+YY on even bonds, XX+YY on
/// odd bonds, all single-Z terms, all ZZ terms. Generators are rescaled by
/// the group's largest coefficient magnitude.
TermGroups hva_term_groups(const SchwingerParams& p);

/// LadderParams whose Hamiltonian equals the snake-ordered Hubbard
/// Hamiltonian without its constant term.
LadderParams hubbard_as_ladder(const HubbardParams& p);

}  // namespace vqs
