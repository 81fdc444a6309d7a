#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "vqs/models.hpp"
#include "vqs/mps.hpp"
#include "vqs/pauli.hpp"

namespace vqs {

/// Matrix product operator in sparse automaton form: each site holds a list
/// of (from, to, 2x2 block) transitions between operator-bond states, with
/// row/column boundary vectors selecting the start and accept states.
template <typename Scalar>
struct Mpo {
  struct Transition {
    int from = 0, to = 0;
    Eigen::Matrix<Scalar, 2, 2> op;
  };
  struct Site {
    int w_l = 1, w_r = 1;
    std::vector<Transition> transitions;
  };
  std::vector<Site> sites;
  Eigen::Vector<Scalar, Eigen::Dynamic> boundary_left;   // length w_0
  Eigen::Vector<Scalar, Eigen::Dynamic> boundary_right;  // length w_N

  int n_sites() const { return static_cast<int>(sites.size()); }
  int bond_dim(int cut) const {
    if (cut == n_sites()) return static_cast<int>(boundary_right.size());
    return sites[cut].w_l;
  }
  int max_bond_dim() const {
    int m = 1;
    for (int c = 0; c <= n_sites(); ++c) m = std::max(m, bond_dim(c));
    return m;
  }
};

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> letter_matrix(char a);

template <>
inline Eigen::Matrix<double, 2, 2> letter_matrix<double>(char a) {
  Eigen::Matrix<double, 2, 2> m;
  switch (a) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'y': m << 0, 1, -1, 0; break;  // iY, real stand-in
    case 'Z': m << 1, 0, 0, -1; break;
    default:
      throw std::invalid_argument("letter_matrix<double>: Y needs complex");
  }
  return m;
}

template <>
inline Eigen::Matrix<cdouble, 2, 2> letter_matrix<cdouble>(char a) {
  Eigen::Matrix<cdouble, 2, 2> m;
  switch (a) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cdouble{0, -1}, cdouble{0, 1}, 0; break;
    case 'y': m << 0, 1, -1, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("letter_matrix: bad letter");
  }
  return m;
}

/// A term prepared for automaton construction: non-identity (site, letter)
/// entries plus a scalar weight carried by the closing transition. For the
/// real instantiation each Y is replaced by iY ('y') and the weight picks up
/// (-i)^(number of Y), which must stay real.
template <typename Scalar>
struct AutomatonTerm {
  std::vector<std::pair<int, char>> ops;
  Scalar weight;
};

template <typename Scalar>
Scalar real_or_fail(cdouble c, const char* what) {
  if constexpr (std::is_same_v<Scalar, double>) {
    if (std::abs(c.imag()) > 1e-14 * (1.0 + std::abs(c.real())))
      throw std::invalid_argument(std::string(what) +
                                  ": not representable with real scalars");
    return c.real();
  } else {
    return c;
  }
}

template <typename Scalar>
std::vector<AutomatonTerm<Scalar>> prepare_terms(const PauliSum& h) {
  std::vector<AutomatonTerm<Scalar>> out;
  for (const auto& t : h.terms()) {
    AutomatonTerm<Scalar> at;
    cdouble w = t.coefficient();
    int n_y = 0;
    for (int k = 0; k < t.n_qubits(); ++k) {
      char a = t.letters()[k];
      if (a == 'I') continue;
      if (a == 'Y' && std::is_same_v<Scalar, double>) {
        a = 'y';
        ++n_y;
      }
      at.ops.push_back({k, a});
    }
    // Y = -i * (iY); the accumulated power of -i folds into the weight.
    switch (n_y & 3) {
      case 1: w *= cdouble{0, -1}; break;
      case 2: w *= -1.0; break;
      case 3: w *= cdouble{0, 1}; break;
      default: break;
    }
    at.weight = real_or_fail<Scalar>(w, "mpo term");
    out.push_back(std::move(at));
  }
  return out;
}

}  // namespace detail

/// Finite-state-automaton MPO for a Pauli sum. Every term follows one
/// accepting path from the shared start state to the shared done state, the
/// coefficient riding on the closing transition. Mid-term states are merged
/// whenever the remaining (sites, letters, weight) suffix coincides, so the
/// bond dimension never exceeds 2 plus the number of distinct open suffixes
/// crossing a cut. The identity offset enters as a start->done transition on
/// site 0.
template <typename Scalar>
Mpo<Scalar> mpo_from_pauli_sum(const PauliSum& h) {
  const int n = h.n_qubits();
  if (n < 1) throw std::invalid_argument("mpo_from_pauli_sum: empty system");
  const auto terms = detail::prepare_terms<Scalar>(h);

  // Suffix signature of a term at a cut: remaining ops plus the weight.
  struct Suffix {
    std::vector<std::pair<int, char>> ops;
    double w_re, w_im;
    bool operator<(const Suffix& o) const {
      if (ops != o.ops) return ops < o.ops;
      if (w_re != o.w_re) return w_re < o.w_re;
      return w_im < o.w_im;
    }
  };
  auto suffix_at = [&](const detail::AutomatonTerm<Scalar>& t, int cut) {
    Suffix s;
    for (const auto& [site, a] : t.ops)
      if (site >= cut) s.ops.push_back({site, a});
    using std::imag;
    using std::real;
    s.w_re = real(t.weight);
    s.w_im = imag(t.weight);
    return s;
  };

  // States per cut: 0 = start, 1 = done (interior cuts), then one state per
  // distinct open suffix. Cut 0 holds only start, cut n only done.
  std::vector<std::map<Suffix, int>> mid(n + 1);
  std::vector<int> width(n + 1, 2);
  width[0] = 1;
  width[n] = 1;
  for (const auto& t : terms) {
    const int first = t.ops.front().first;
    const int last = t.ops.back().first;
    for (int cut = first + 1; cut <= last; ++cut) {
      auto sig = suffix_at(t, cut);
      auto [it, fresh] = mid[cut].insert({std::move(sig), width[cut]});
      if (fresh) ++width[cut];
    }
  }

  Mpo<Scalar> mpo;
  mpo.sites.resize(n);
  for (int i = 0; i < n; ++i) {
    mpo.sites[i].w_l = width[i];
    mpo.sites[i].w_r = width[i + 1];
  }
  const int start_of = 0;
  // done is state 1 at interior cuts and the only state (0) at cut n.
  auto done_of = [&](int cut) { return cut == n ? 0 : 1; };

  // Keyed transition table. Transitions leaving the aggregate start state
  // sum distinct term contributions; transitions leaving a merged mid-state
  // are fully determined by that state, so repeats are identical and are
  // inserted once.
  std::vector<std::map<std::pair<int, int>, Eigen::Matrix<Scalar, 2, 2>>>
      table(n);
  auto add = [&](int site, int from, int to,
                 const Eigen::Matrix<Scalar, 2, 2>& op, bool sum) {
    auto key = std::make_pair(from, to);
    auto it = table[site].find(key);
    if (it == table[site].end())
      table[site].insert({key, op});
    else if (sum)
      it->second += op;
  };

  const auto eye = detail::letter_matrix<Scalar>('I');
  // Idle flows for terms that have not started or have already finished.
  for (int i = 0; i < n; ++i) {
    if (i + 1 < n) add(i, start_of, start_of, eye, false);
    if (i > 0) add(i, done_of(i), done_of(i + 1), eye, false);
  }
  if (h.constant() != 0.0)
    add(0, start_of, done_of(1), Scalar(h.constant()) * eye, true);

  for (const auto& t : terms) {
    const int first = t.ops.front().first;
    const int last = t.ops.back().first;
    std::size_t next_op = 0;
    for (int i = first; i <= last; ++i) {
      char a = 'I';
      if (next_op < t.ops.size() && t.ops[next_op].first == i)
        a = t.ops[next_op++].second;
      Eigen::Matrix<Scalar, 2, 2> op = detail::letter_matrix<Scalar>(a);
      if (i == last) op *= t.weight;
      const int from = i == first ? start_of : mid[i].at(suffix_at(t, i));
      const int to =
          i == last ? done_of(i + 1) : mid[i + 1].at(suffix_at(t, i + 1));
      add(i, from, to, op, from == start_of);
    }
  }

  for (int i = 0; i < n; ++i)
    for (const auto& [key, op] : table[i])
      mpo.sites[i].transitions.push_back({key.first, key.second, op});

  mpo.boundary_left = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(width[0]);
  mpo.boundary_left(start_of) = Scalar(1);
  mpo.boundary_right = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(width[n]);
  mpo.boundary_right(done_of(n)) = Scalar(1);
  return mpo;
}

/// Hand-built constant-bond-dimension MPO for the Schwinger Hamiltonian.
/// The ZZ couplings (N-1-k)/2 depend only on the closing site, so a single
/// open-Z state serves every pair; total bond dimension 5.
template <typename Scalar>
Mpo<Scalar> schwinger_mpo(const SchwingerParams& p) {
  const PauliSum h = schwinger_hamiltonian(p);  // reuse merged coefficients
  const int n = p.n_sites;
  // Collect single-Z coefficients and the constant from the merged sum.
  std::vector<double> z_coeff(n, 0.0);
  for (const auto& t : h.terms())
    if (t.is_diagonal() && t.weight() == 1) {
      int k = 0;
      while (t.letters()[k] == 'I') ++k;
      z_coeff[k] = t.coefficient().real();
    }

  enum { kStart = 0, kOpenX = 1, kOpenY = 2, kOpenZ = 3, kDone = 4 };
  const int w = 5;
  Mpo<Scalar> mpo;
  mpo.sites.resize(n);
  const auto eye = detail::letter_matrix<Scalar>('I');
  const auto x_op = detail::letter_matrix<Scalar>('X');
  // iY is real; the pair picks up (-i)^2 = -1 on the closing coefficient.
  const auto y_op = detail::letter_matrix<Scalar>('y');
  const auto z_op = detail::letter_matrix<Scalar>('Z');
  for (int i = 0; i < n; ++i) {
    auto& site = mpo.sites[i];
    site.w_l = i == 0 ? 1 : w;
    site.w_r = i == n - 1 ? 1 : w;
    auto add = [&](int from, int to, Eigen::Matrix<Scalar, 2, 2> op) {
      if (i == 0 && from != kStart) return;
      if (i == n - 1 && to != kDone) return;
      site.transitions.push_back({i == 0 ? 0 : from,
                                  i == n - 1 ? 0 : to, op});
    };
    if (i + 1 < n) add(kStart, kStart, eye);
    if (i > 0) add(kDone, kDone, eye);
    // Diagonal closures.
    Eigen::Matrix<Scalar, 2, 2> diag =
        Scalar(z_coeff[i]) * z_op;
    if (i == 0) diag += Scalar(h.constant()) * eye;
    add(kStart, kDone, diag);
    // Nearest-neighbour hopping, coefficient x/2 on the closing site.
    if (i + 1 < n) {
      add(kStart, kOpenX, x_op);
      add(kStart, kOpenY, y_op);
    }
    if (i > 0) {
      add(kOpenX, kDone, Scalar(p.x / 2.0) * x_op);
      add(kOpenY, kDone, Scalar(-p.x / 2.0) * y_op);
    }
    // Long-range ZZ: open anywhere, close at k with weight (n-1-k)/2.
    if (i + 1 < n) add(kStart, kOpenZ, z_op);
    if (i > 0 && i + 1 < n) add(kOpenZ, kOpenZ, eye);
    if (i > 0 && n - 1 - i > 0)
      add(kOpenZ, kDone, Scalar(0.5 * (n - 1 - i)) * z_op);
  }
  mpo.boundary_left = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(1);
  mpo.boundary_left(0) = Scalar(1);
  mpo.boundary_right = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(1);
  mpo.boundary_right(0) = Scalar(1);
  return mpo;
}

/// Dense 2^n x 2^n matrix of an MPO (test sizes only).
template <typename Scalar>
Eigen::MatrixXcd mpo_to_dense(const Mpo<Scalar>& mpo) {
  const int n = mpo.n_sites();
  if (n > 12) throw std::invalid_argument("mpo_to_dense: too large");
  std::vector<Eigen::MatrixXcd> acc(mpo.sites[0].w_l);
  for (int w = 0; w < mpo.sites[0].w_l; ++w)
    acc[w] = cdouble(mpo.boundary_left(w)) * Eigen::MatrixXcd::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    std::vector<Eigen::MatrixXcd> next(
        mpo.sites[i].w_r,
        Eigen::MatrixXcd::Zero(acc[0].rows() * 2, acc[0].cols() * 2));
    for (const auto& tr : mpo.sites[i].transitions) {
      if (acc[tr.from].size() == 0) continue;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          // Qubit i carries index weight 2^i.
          next[tr.to].block(r * acc[tr.from].rows(), c * acc[tr.from].cols(),
                            acc[tr.from].rows(), acc[tr.from].cols()) +=
              cdouble(tr.op(r, c)) * acc[tr.from];
        }
    }
    acc = std::move(next);
  }
  Eigen::MatrixXcd out =
      Eigen::MatrixXcd::Zero(acc[0].rows(), acc[0].cols());
  for (int w = 0; w < static_cast<int>(acc.size()); ++w)
    out += cdouble(mpo.boundary_right(w)) * acc[w];
  return out;
}

/// Full sandwich contraction <psi|O|psi> from left to right.
template <typename Scalar>
Scalar mpo_expectation(const Mpo<Scalar>& o, const Mps<Scalar>& m) {
  if (o.n_sites() != m.n_sites())
    throw std::invalid_argument("mpo_expectation: shape mismatch");
  const int d = m.phys_dim();
  // env[w](gamma, beta): bra bond x ket bond at the current cut.
  std::vector<Mat<Scalar>> env(o.sites[0].w_l);
  for (int w = 0; w < o.sites[0].w_l; ++w)
    env[w] = o.boundary_left(w) * Mat<Scalar>::Ones(1, 1);
  for (int i = 0; i < o.n_sites(); ++i) {
    std::vector<Mat<Scalar>> next(
        o.sites[i].w_r, Mat<Scalar>::Zero(m.sites[i][0].cols(),
                                          m.sites[i][0].cols()));
    for (const auto& tr : o.sites[i].transitions) {
      if (env[tr.from].size() == 0) continue;
      for (int s = 0; s < d; ++s)
        for (int sp = 0; sp < d; ++sp) {
          if (tr.op(s, sp) == Scalar(0)) continue;
          next[tr.to] += tr.op(s, sp) * (m.sites[i][s].adjoint() *
                                         env[tr.from] * m.sites[i][sp]);
        }
    }
    env = std::move(next);
  }
  Scalar out = Scalar(0);
  for (int w = 0; w < static_cast<int>(env.size()); ++w)
    out += o.boundary_right(w) * env[w](0, 0);
  return detail::conj_scalar(m.norm_factor) * m.norm_factor * out;
}

}  // namespace vqs
