#include "vqs/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vqs {

namespace {

cdouble i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

int parity(std::uint64_t bits) { return std::popcount(bits) & 1; }

}  // namespace

PauliString::PauliString(std::string letters, cdouble coefficient)
    : letters_(std::move(letters)), coeff_(coefficient) {
  if (letters_.size() > 64)
    throw std::invalid_argument("PauliString: more than 64 qubits");
  for (std::size_t k = 0; k < letters_.size(); ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    switch (letters_[k]) {
      case 'I': break;
      case 'X': x_mask_ |= bit; break;
      case 'Y': y_mask_ |= bit; break;
      case 'Z': z_mask_ |= bit; break;
      default:
        throw std::invalid_argument("PauliString: invalid letter '" +
                                    std::string(1, letters_[k]) + "'");
    }
  }
}

int PauliString::weight() const {
  return std::popcount(x_mask_ | y_mask_ | z_mask_);
}

bool PauliString::commute(const PauliString& a, const PauliString& b) {
  // Count qubits where both act non-trivially with different letters.
  const std::uint64_t ax = a.x_mask_, ay = a.y_mask_, az = a.z_mask_;
  const std::uint64_t bx = b.x_mask_, by = b.y_mask_, bz = b.z_mask_;
  const int anticommuting = parity((ax & by) ^ (ax & bz)) ^
                            parity((ay & bx) ^ (ay & bz)) ^
                            parity((az & bx) ^ (az & by));
  return anticommuting == 0;
}

StateVector StateVector::zero(int n_qubits) {
  StateVector v;
  v.n_qubits = n_qubits;
  v.amplitudes = Eigen::VectorXcd::Zero(std::int64_t{1} << n_qubits);
  return v;
}

StateVector StateVector::basis(const BasisState& s) {
  StateVector v = zero(s.n_qubits);
  v.amplitudes[static_cast<std::int64_t>(s.bits)] = 1.0;
  return v;
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliString> terms,
                   double constant)
    : n_qubits_(n_qubits), constant_(constant) {
  for (auto& t : terms) add_term(t.letters(), t.coefficient());
  merge();
}

void PauliSum::add_term(const std::string& letters, cdouble coeff) {
  if (static_cast<int>(letters.size()) != n_qubits_)
    throw std::invalid_argument("PauliSum: term length != n_qubits");
  PauliString p(letters, coeff);
  if (p.is_identity()) {
    if (std::abs(coeff.imag()) > 1e-12 * (1.0 + std::abs(coeff.real())))
      throw std::invalid_argument("PauliSum: complex identity offset");
    constant_ += coeff.real();
    return;
  }
  terms_.push_back(std::move(p));
}

void PauliSum::merge() {
  std::map<std::string, cdouble> acc;
  for (const auto& t : terms_) acc[t.letters()] += t.coefficient();
  double scale = 0.0;
  for (const auto& [l, c] : acc) scale = std::max(scale, std::abs(c));
  terms_.clear();
  const double drop = 1e-14 * (1.0 + scale);
  for (const auto& [l, c] : acc)
    if (std::abs(c) > drop) terms_.emplace_back(l, c);
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& t : terms_)
    if (std::abs(t.coefficient().imag()) >
        tol * (1.0 + std::abs(t.coefficient().real())))
      return false;
  return true;
}

double PauliSum::max_abs_coefficient() const {
  double m = std::abs(constant_);
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coefficient()));
  return m;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_qubits_ != n_qubits_)
    throw std::invalid_argument("PauliSum: qubit count mismatch");
  for (const auto& t : other.terms_) terms_.push_back(t);
  constant_ += other.constant_;
  merge();
  return *this;
}

PauliSum& PauliSum::operator*=(double scale) {
  for (auto& t : terms_) t.set_coefficient(t.coefficient() * scale);
  constant_ *= scale;
  return *this;
}

std::pair<BasisState, cdouble> apply_string(const PauliString& p,
                                            const BasisState& s) {
  if (p.n_qubits() != s.n_qubits)
    throw std::invalid_argument("apply_string: length mismatch");
  BasisState out{s.bits ^ p.flip_mask(), s.n_qubits};
  // Y|0> = i|1>, Y|1> = -i|0>, Z|b> = (-1)^b |b>: each Y or Z qubit
  // contributes a sign from the source bit, Y an extra factor of i.
  cdouble phase = i_power(std::popcount(p.y_mask()));
  if (parity(s.bits & p.phase_mask())) phase = -phase;
  return {out, phase * p.coefficient()};
}

StateVector matvec(const PauliSum& h, const StateVector& v) {
  if (h.n_qubits() != v.n_qubits)
    throw std::invalid_argument("matvec: dimension mismatch");
  const std::int64_t dim = v.dim();
  StateVector out;
  out.n_qubits = v.n_qubits;
  out.amplitudes = h.constant() * v.amplitudes;
  for (const auto& t : h.terms()) {
    const std::uint64_t flip = t.flip_mask();
    const std::uint64_t pm = t.phase_mask();
    const cdouble base = i_power(std::popcount(t.y_mask())) * t.coefficient();
    auto& o = out.amplitudes;
    const auto& a = v.amplitudes;
    if (flip == 0) {
      for (std::int64_t s = 0; s < dim; ++s)
        o[s] += parity(static_cast<std::uint64_t>(s) & pm) ? -base * a[s]
                                                           : base * a[s];
    } else {
      for (std::int64_t s = 0; s < dim; ++s) {
        const cdouble e =
            parity(static_cast<std::uint64_t>(s) & pm) ? -base : base;
        o[static_cast<std::int64_t>(static_cast<std::uint64_t>(s) ^ flip)] +=
            e * a[s];
      }
    }
  }
  return out;
}

double expectation(const PauliSum& h, const StateVector& v) {
  const double nrm2 = v.amplitudes.squaredNorm();
  if (!(nrm2 > 0.0)) throw std::domain_error("expectation: zero vector");
  const StateVector hv = matvec(h, v);
  const cdouble q = v.amplitudes.dot(hv.amplitudes);
  if (std::abs(q.imag()) > 1e-10 * (1.0 + std::abs(q.real())))
    throw std::runtime_error("expectation: non-Hermitian quadratic form");
  return q.real() / nrm2;
}

std::vector<std::pair<BasisState, cdouble>> connected_elements(
    const PauliSum& h, const BasisState& s) {
  // <s|P|s'> with s' = s ^ flip; the phase is evaluated on the source s'.
  std::vector<std::pair<BasisState, cdouble>> out;
  std::map<std::uint64_t, cdouble> acc;
  for (const auto& t : h.terms()) {
    const std::uint64_t target = s.bits ^ t.flip_mask();
    cdouble elem = i_power(std::popcount(t.y_mask())) * t.coefficient();
    if (parity(target & t.phase_mask())) elem = -elem;
    acc[target] += elem;
  }
  const double drop = 1e-15 * (1.0 + h.max_abs_coefficient());
  for (const auto& [bits, elem] : acc)
    if (std::abs(elem) > drop)
      out.push_back({BasisState{bits, s.n_qubits}, elem});
  return out;
}

Eigen::MatrixXcd to_dense(const PauliSum& h, int max_qubits) {
  if (h.n_qubits() > max_qubits)
    throw std::invalid_argument("to_dense: qubit count above cap");
  const std::int64_t dim = std::int64_t{1} << h.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m.diagonal().array() += h.constant();
  for (const auto& t : h.terms()) {
    const std::uint64_t flip = t.flip_mask();
    const std::uint64_t pm = t.phase_mask();
    const cdouble base = i_power(std::popcount(t.y_mask())) * t.coefficient();
    for (std::int64_t src = 0; src < dim; ++src) {
      const cdouble e =
          parity(static_cast<std::uint64_t>(src) & pm) ? -base : base;
      m(static_cast<std::int64_t>(static_cast<std::uint64_t>(src) ^ flip),
        src) += e;
    }
  }
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw std::runtime_error("to_dense: matrix is not Hermitian");
  return m;
}

PauliSum parse_pauli_sum(std::istream& in) {
  std::string line;
  std::vector<std::pair<std::string, cdouble>> raw;
  int n = -1;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double re, im;
    std::string letters;
    if (!(ls >> re >> im >> letters)) {
      std::string rest;
      ls.clear();
      if (ls >> rest)
        throw std::runtime_error("parse_pauli_sum: malformed line: " + line);
      continue;  // blank or comment-only line
    }
    if (n < 0) n = static_cast<int>(letters.size());
    if (static_cast<int>(letters.size()) != n)
      throw std::runtime_error("parse_pauli_sum: inconsistent string length");
    raw.push_back({letters, cdouble{re, im}});
  }
  if (n < 0) throw std::runtime_error("parse_pauli_sum: no terms");
  PauliSum h(n);
  for (const auto& [letters, c] : raw) h.add_term(letters, c);
  h.merge();
  return h;
}

PauliSum parse_pauli_sum_text(const std::string& text) {
  std::istringstream in(text);
  return parse_pauli_sum(in);
}

void write_pauli_sum(std::ostream& out, const PauliSum& h) {
  out.precision(17);
  if (h.constant() != 0.0 || h.terms().empty())
    out << h.constant() << " 0 " << std::string(h.n_qubits(), 'I') << "\n";
  for (const auto& t : h.terms())
    out << t.coefficient().real() << " " << t.coefficient().imag() << " "
        << t.letters() << "\n";
}

}  // namespace vqs
