#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vqs {

using cdouble = std::complex<double>;

/// Computational basis state of n qubits. Bit k of `bits` is the value of
/// qubit k; qubit 0 is the least significant bit of the basis index.
/// Bit value 0 corresponds to Z eigenvalue +1 (spin s = +1), bit value 1
/// to Z eigenvalue -1 (s = -1).
struct BasisState {
  std::uint64_t bits = 0;
  int n_qubits = 0;

  bool operator==(const BasisState&) const = default;

  int bit(int k) const { return static_cast<int>((bits >> k) & 1u); }
  /// Z eigenvalue (+1 or -1) of qubit k.
  int spin(int k) const { return bit(k) == 0 ? +1 : -1; }
};

/// Weighted tensor product of single-qubit Pauli operators.
/// `letters[k]` is the operator acting on qubit k, one of 'I','X','Y','Z'.
class PauliString {
 public:
  PauliString() = default;
  PauliString(std::string letters, cdouble coefficient);

  const std::string& letters() const { return letters_; }
  cdouble coefficient() const { return coeff_; }
  int n_qubits() const { return static_cast<int>(letters_.size()); }

  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t y_mask() const { return y_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }
  /// Qubits whose bit is flipped by this string (X or Y positions).
  std::uint64_t flip_mask() const { return x_mask_ | y_mask_; }
  /// Qubits contributing a sign that depends on the source state (Y or Z).
  std::uint64_t phase_mask() const { return y_mask_ | z_mask_; }

  bool is_identity() const { return (x_mask_ | y_mask_ | z_mask_) == 0; }
  bool is_diagonal() const { return (x_mask_ | y_mask_) == 0; }
  int weight() const;

  void set_coefficient(cdouble c) { coeff_ = c; }

  /// True when the two strings commute as operators (the number of qubits
  /// where both act non-trivially with different letters is even).
  static bool commute(const PauliString& a, const PauliString& b);

 private:
  std::string letters_;
  cdouble coeff_{0.0, 0.0};
  std::uint64_t x_mask_ = 0, y_mask_ = 0, z_mask_ = 0;
};

/// Dense complex amplitudes over the 2^n computational basis states,
/// basis index = sum_k bit_k 2^k.
struct StateVector {
  Eigen::VectorXcd amplitudes;
  int n_qubits = 0;

  StateVector() = default;
  StateVector(int n, Eigen::VectorXcd amps)
      : amplitudes(std::move(amps)), n_qubits(n) {}
  static StateVector zero(int n_qubits);
  /// The basis state |s> as a dense vector.
  static StateVector basis(const BasisState& s);

  std::int64_t dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

/// Weighted sum of Pauli strings plus a real multiple of the identity.
/// All terms share the qubit count; construction merges duplicate letter
/// sequences and folds identity strings into the constant.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}
  PauliSum(int n_qubits, std::vector<PauliString> terms, double constant = 0.0);

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  double constant() const { return constant_; }

  /// Adds c * (Pauli string); identity strings accumulate into the constant.
  void add_term(const std::string& letters, cdouble coeff);
  void add_constant(double c) { constant_ += c; }

  /// Merges duplicate letter sequences and drops negligible terms.
  void merge();

  std::size_t n_terms() const { return terms_.size(); }
  /// True when every coefficient is real to within `tol` (a Pauli string is
  /// Hermitian, so real coefficients make the sum Hermitian).
  bool is_hermitian(double tol = 1e-12) const;
  double max_abs_coefficient() const;

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator*=(double scale);

 private:
  int n_qubits_ = 0;
  std::vector<PauliString> terms_;
  double constant_ = 0.0;
};

/// Applies a Pauli string to a basis state: P|s> = elem |s'>. Returns the
/// unique image state s' and the matrix element <s'|P|s> (including the
/// string's coefficient).
std::pair<BasisState, cdouble> apply_string(const PauliString& p,
                                            const BasisState& s);

/// H|v> + constant*|v>, computed term by term without materializing H.
StateVector matvec(const PauliSum& h, const StateVector& v);

/// <v|H|v> / <v|v>. Throws std::domain_error on a zero vector and
/// std::runtime_error if the quadratic form has a relative imaginary part
/// above 1e-10 (non-Hermitian input).
double expectation(const PauliSum& h, const StateVector& v);

/// All distinct s' with <s|H|s'> != 0 together with that matrix element.
/// The identity constant is not included; callers add h.constant() to the
/// diagonal where required.
std::vector<std::pair<BasisState, cdouble>> connected_elements(
    const PauliSum& h, const BasisState& s);

/// Dense 2^n x 2^n matrix of H (constant included). Asserts Hermiticity to
/// 1e-12. Throws if n_qubits exceeds `max_qubits`.
Eigen::MatrixXcd to_dense(const PauliSum& h, int max_qubits = 14);

/// Text fixture format: one term per line, "<re> <im> <letters>"; '#' starts
/// a comment; the constant is carried by an all-I string.
PauliSum parse_pauli_sum(std::istream& in);
PauliSum parse_pauli_sum_text(const std::string& text);
void write_pauli_sum(std::ostream& out, const PauliSum& h);

}  // namespace vqs
