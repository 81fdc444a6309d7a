#include "vqs/models.hpp"

#include <cmath>
#include <stdexcept>

namespace vqs {

namespace {

std::string letters_one(int n, int k, char a) {
  std::string s(n, 'I');
  s[k] = a;
  return s;
}

std::string letters_two(int n, int j, int k, char a, char b) {
  std::string s(n, 'I');
  s[j] = a;
  s[k] = b;
  return s;
}

void check_commuting(const TermGroup& g) {
  const auto& ts = g.terms.terms();
  for (std::size_t a = 0; a < ts.size(); ++a)
    for (std::size_t b = a + 1; b < ts.size(); ++b)
      if (!PauliString::commute(ts[a], ts[b]))
        throw std::logic_error("TermGroup '" + g.label +
                               "': non-commuting terms");
}

}  // namespace

PauliSum TermGroups::total() const {
  PauliSum h(n_qubits);
  for (const auto& g : groups)
    for (const auto& t : g.terms.terms()) h.add_term(t.letters(), t.coefficient());
  h.add_constant(constant);
  h.merge();
  return h;
}

PauliSum hubbard_hamiltonian(const HubbardParams& p) {
  const int n = p.n_sites;
  if (n < 2) throw std::invalid_argument("hubbard: n_sites must be >= 2");
  if (p.normalization == HubbardNormalization::PerSiteOverT && !(p.t > 0.0))
    throw std::invalid_argument("hubbard: PerSiteOverT requires t > 0");
  const int nq = 2 * n;
  const double u_over_t = p.u / p.t;
  // Built in units of 1/(tN); Raw multiplies through by t*N at the end.
  PauliSum h(nq);
  const double hop = -1.0 / (2.0 * n);
  const double inter = u_over_t / (4.0 * n);
  if (p.ordering == HubbardOrdering::Snake) {
    // k = N*sigma + j; t_k vanishes at k = N-1 where the two legs meet.
    for (int k = 0; k < nq - 1; ++k) {
      if (k == n - 1) continue;
      h.add_term(letters_two(nq, k, k + 1, 'X', 'X'), hop);
      h.add_term(letters_two(nq, k, k + 1, 'Y', 'Y'), hop);
    }
    for (int k = 0; k < n; ++k)
      h.add_term(letters_two(nq, k, k + n, 'Z', 'Z'), inter);
  } else {
    // k = 2j + sigma; hopping carries -Z on the intermediate qubit.
    for (int k = 0; k + 2 < nq; ++k) {
      std::string xzx = letters_one(nq, k + 1, 'Z');
      xzx[k] = 'X';
      xzx[k + 2] = 'X';
      std::string yzy = letters_one(nq, k + 1, 'Z');
      yzy[k] = 'Y';
      yzy[k + 2] = 'Y';
      h.add_term(xzx, -hop);
      h.add_term(yzy, -hop);
    }
    for (int j = 0; j < n; ++j)
      h.add_term(letters_two(nq, 2 * j, 2 * j + 1, 'Z', 'Z'), inter);
  }
  h.add_constant(-u_over_t / 4.0);
  h.merge();
  if (p.normalization == HubbardNormalization::Raw) h *= p.t * n;
  return h;
}

PauliSum schwinger_hamiltonian(const SchwingerParams& p) {
  const int n = p.n_sites;
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("schwinger: n_sites must be even and >= 2");
  PauliSum h(n);
  for (int k = 0; k + 1 < n; ++k) {
    h.add_term(letters_two(n, k, k + 1, 'X', 'X'), p.x / 2.0);
    h.add_term(letters_two(n, k, k + 1, 'Y', 'Y'), p.x / 2.0);
  }
  double constant = 0.0;
  for (int k = 0; k < n; ++k) {
    constant += p.mu / 2.0;
    h.add_term(letters_one(n, k, 'Z'), (k % 2 == 0 ? 1.0 : -1.0) * p.mu / 2.0);
  }
  // Electric term: sum_n L_n^2 with L_n = c_n + (1/2) sum_{k<=n} Z_k and
  // c_n = ell + 1/2 for even n, ell for odd n. Expanding with Z^2 = I gives
  // an identity offset, single-Z strings and ZZ strings.
  for (int nn = 0; nn + 1 < n; ++nn) {
    const double c = p.ell + (nn % 2 == 0 ? 0.5 : 0.0);
    constant += c * c + 0.25 * (nn + 1);
  }
  for (int k = 0; k + 1 < n; ++k) {
    double zc = 0.0;
    for (int nn = k; nn + 1 < n; ++nn)
      zc += p.ell + (nn % 2 == 0 ? 0.5 : 0.0);
    h.add_term(letters_one(n, k, 'Z'), zc);
  }
  for (int j = 0; j + 1 < n; ++j)
    for (int k = j + 1; k + 1 < n; ++k)
      h.add_term(letters_two(n, j, k, 'Z', 'Z'), 0.5 * (n - 1 - k));
  h.add_constant(constant);
  h.merge();
  return h;
}

PauliSum ladder_hamiltonian(const LadderParams& p) {
  const int n = p.n_sites;
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("ladder: n_sites must be even and >= 2");
  const int nq = 2 * n;
  const char alpha[3] = {'X', 'Y', 'Z'};
  PauliSum h(nq);
  for (int sigma = 0; sigma < 2; ++sigma)
    for (int j = 0; j + 1 < n; ++j)
      for (int a = 0; a < 3; ++a) {
        if (p.c_h[a] == 0.0) continue;
        const int k = n * sigma + j;
        h.add_term(letters_two(nq, k, k + 1, alpha[a], alpha[a]), p.c_h[a]);
      }
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < 3; ++a) {
      if (p.c_v[a] == 0.0) continue;
      h.add_term(letters_two(nq, j, j + n, alpha[a], alpha[a]), p.c_v[a]);
    }
  h.merge();
  return h;
}

PauliSum ising_example_hamiltonian(int n, double j_coupling, double g_field) {
  if (n < 2) throw std::invalid_argument("ising: n must be >= 2");
  PauliSum h(n);
  for (int i = 0; i + 1 < n; ++i)
    h.add_term(letters_two(n, i, i + 1, 'X', 'X'), -j_coupling);
  for (int i = 0; i < n; ++i) h.add_term(letters_one(n, i, 'Z'), -g_field);
  h.merge();
  return h;
}

TermGroups hva_term_groups(const LadderParams& p) {
  const PauliSum h = ladder_hamiltonian(p);
  const int n = p.n_sites;
  TermGroups out;
  out.n_qubits = h.n_qubits();
  out.constant = h.constant();
  // Circuit order of Eq-style h-even X,Y,Z; h-odd Z,Y,X; then the v block.
  struct Slot {
    std::string label;
    bool horizontal;
    int parity;
    char alpha;
  };
  const std::vector<Slot> slots = {
      {"h-even-X", true, 0, 'X'},  {"h-even-Y", true, 0, 'Y'},
      {"h-even-Z", true, 0, 'Z'},  {"h-odd-Z", true, 1, 'Z'},
      {"h-odd-Y", true, 1, 'Y'},   {"h-odd-X", true, 1, 'X'},
      {"v-even-X", false, 0, 'X'}, {"v-even-Y", false, 0, 'Y'},
      {"v-even-Z", false, 0, 'Z'}, {"v-odd-Z", false, 1, 'Z'},
      {"v-odd-Y", false, 1, 'Y'},  {"v-odd-X", false, 1, 'X'}};
  for (const auto& s : slots)
    out.groups.push_back({s.label, PauliSum(out.n_qubits), 1.0});
  for (const auto& t : h.terms()) {
    // Every ladder term touches exactly two qubits with equal letters.
    int a = -1, b = -1;
    for (int k = 0; k < out.n_qubits; ++k)
      if (t.letters()[k] != 'I') (a < 0 ? a : b) = k;
    const char alpha = t.letters()[a];
    const bool horizontal = (b == a + 1);
    const int j = horizontal ? a % n : a;
    std::size_t idx = 0;
    for (; idx < slots.size(); ++idx)
      if (slots[idx].horizontal == horizontal && slots[idx].parity == j % 2 &&
          slots[idx].alpha == alpha)
        break;
    out.groups[idx].terms.add_term(t.letters(), t.coefficient());
  }
  for (const auto& g : out.groups) check_commuting(g);
  return out;
}

TermGroups hva_term_groups(const SchwingerParams& p) {
  const PauliSum h = schwinger_hamiltonian(p);
  TermGroups out;
  out.n_qubits = h.n_qubits();
  out.constant = h.constant();
  out.groups = {{"hop-even", PauliSum(out.n_qubits), 1.0},
                {"hop-odd", PauliSum(out.n_qubits), 1.0},
                {"z-field", PauliSum(out.n_qubits), 1.0},
                {"zz-electric", PauliSum(out.n_qubits), 1.0}};
  for (const auto& t : h.terms()) {
    std::size_t idx;
    if (t.is_diagonal()) {
      idx = (t.weight() == 1) ? 2 : 3;
    } else {
      int a = 0;
      while (t.letters()[a] == 'I') ++a;
      idx = (a % 2 == 0) ? 0 : 1;
    }
    out.groups[idx].terms.add_term(t.letters(), t.coefficient());
  }
  for (auto& g : out.groups) {
    const double m = g.terms.max_abs_coefficient();
    g.generator_scale = m > 0.0 ? m : 1.0;
    check_commuting(g);
  }
  return out;
}

LadderParams hubbard_as_ladder(const HubbardParams& p) {
  if (p.ordering != HubbardOrdering::Snake)
    throw std::invalid_argument(
        "hubbard_as_ladder: only the snake ordering has ladder geometry");
  const int n = p.n_sites;
  LadderParams lp;
  lp.n_sites = n;
  double hop = -1.0 / (2.0 * n);
  double inter = (p.u / p.t) / (4.0 * n);
  if (p.normalization == HubbardNormalization::Raw) {
    hop *= p.t * n;
    inter *= p.t * n;
  }
  lp.c_h = {hop, hop, 0.0};
  lp.c_v = {0.0, 0.0, inter};
  return lp;
}

}  // namespace vqs
