#pragma once

#include <complex>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "vqs/pauli.hpp"

namespace vqs {

// Index conventions used throughout the tensor code:
//  - a site tensor is stored as d matrices M[s], each chi_l x chi_r;
//  - the left matricization stacks the physical index over rows,
//    row = s*chi_l + alpha;
//  - the right matricization spreads it over columns, col = s*chi_r + beta;
//  - qubit 0 is the least significant bit of a dense amplitude index.

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SiteTensor = std::vector<Mat<Scalar>>;  // indexed by the physical s

enum class CanonicalState { General, Left, Right, Mixed };

/// Matrix product state with open boundaries: chi_0 = chi_N = 1. The
/// represented state is norm_factor times the tensor contraction, so
/// canonicalized tensors can stay exactly isometric while the norm is kept
/// separately.
template <typename Scalar>
struct Mps {
  std::vector<SiteTensor<Scalar>> sites;
  Scalar norm_factor = Scalar(1);
  CanonicalState canonical = CanonicalState::General;

  int n_sites() const { return static_cast<int>(sites.size()); }
  int phys_dim() const { return static_cast<int>(sites.front().size()); }
  int bond_dim(int cut) const {
    if (cut == n_sites()) return static_cast<int>(sites.back()[0].cols());
    return static_cast<int>(sites[cut][0].rows());
  }
  int max_bond_dim() const {
    int m = 1;
    for (int c = 0; c <= n_sites(); ++c) m = std::max(m, bond_dim(c));
    return m;
  }
};

/// Mixed canonical form A[0..c-1] * diag(lambda) * B[c..N-1]; sum of
/// lambda^2 equals the squared norm of the state.
template <typename Scalar>
struct MixedCanonical {
  std::vector<SiteTensor<Scalar>> left;   // left-canonical A tensors
  Eigen::VectorXd lambda;                 // descending, nonnegative
  std::vector<SiteTensor<Scalar>> right;  // right-canonical B tensors
  int center = 0;                         // bond cut where lambda lives

  int n_sites() const {
    return static_cast<int>(left.size() + right.size());
  }
  Mps<Scalar> to_mps() const;
};

/// Vidal form: Gamma tensors with a diagonal weight vector on every bond.
template <typename Scalar>
struct GammaLambda {
  std::vector<SiteTensor<Scalar>> gamma;
  std::vector<Eigen::VectorXd> lambda;  // N+1 vectors, lambda[0]=lambda[N]=(norm)
};

namespace detail {

inline double conj_scalar(double v) { return v; }
inline cdouble conj_scalar(const cdouble& v) { return std::conj(v); }

template <typename Scalar>
Mat<Scalar> stack_left(const SiteTensor<Scalar>& t) {
  const int d = static_cast<int>(t.size());
  const int chi_l = static_cast<int>(t[0].rows());
  const int chi_r = static_cast<int>(t[0].cols());
  Mat<Scalar> m(d * chi_l, chi_r);
  for (int s = 0; s < d; ++s) m.middleRows(s * chi_l, chi_l) = t[s];
  return m;
}

template <typename Scalar>
SiteTensor<Scalar> unstack_left(const Mat<Scalar>& m, int d) {
  const int chi_l = static_cast<int>(m.rows()) / d;
  SiteTensor<Scalar> t(d);
  for (int s = 0; s < d; ++s) t[s] = m.middleRows(s * chi_l, chi_l);
  return t;
}

template <typename Scalar>
Mat<Scalar> stack_right(const SiteTensor<Scalar>& t) {
  const int d = static_cast<int>(t.size());
  const int chi_l = static_cast<int>(t[0].rows());
  const int chi_r = static_cast<int>(t[0].cols());
  Mat<Scalar> m(chi_l, d * chi_r);
  for (int s = 0; s < d; ++s) m.middleCols(s * chi_r, chi_r) = t[s];
  return m;
}

template <typename Scalar>
SiteTensor<Scalar> unstack_right(const Mat<Scalar>& m, int d) {
  const int chi_r = static_cast<int>(m.cols()) / d;
  SiteTensor<Scalar> t(d);
  for (int s = 0; s < d; ++s) t[s] = m.middleCols(s * chi_r, chi_r);
  return t;
}

template <typename Scalar>
struct ThinSvd {
  Mat<Scalar> u;
  Eigen::VectorXd s;
  Mat<Scalar> vh;
};

/// Thin SVD with numerically-zero singular values trimmed, so exact
/// decompositions keep tight ranks (a product state stays at bond
/// dimension one).
template <typename Scalar>
ThinSvd<Scalar> thin_svd(const Mat<Scalar>& m) {
  ThinSvd<Scalar> out;
  if (m.rows() * m.cols() > 64 * 64) {
    Eigen::BDCSVD<Mat<Scalar>> svd(m,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = {svd.matrixU(), svd.singularValues(),
           Mat<Scalar>(svd.matrixV().adjoint())};
  } else {
    Eigen::JacobiSVD<Mat<Scalar>> svd(
        m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out = {svd.matrixU(), svd.singularValues(),
           Mat<Scalar>(svd.matrixV().adjoint())};
  }
  const double cut = 1e-14 * out.s(0);
  int rank = static_cast<int>(out.s.size());
  while (rank > 1 && out.s(rank - 1) <= cut) --rank;
  if (rank < out.s.size()) {
    out.u = out.u.leftCols(rank).eval();
    out.s = out.s.head(rank).eval();
    out.vh = out.vh.topRows(rank).eval();
  }
  return out;
}

}  // namespace detail

/// Exact MPS decomposition of a dense amplitude vector by a chain of N-1
/// SVDs, no truncation. Returns the left-canonical state and the residual
/// weight (the input norm; 1 for normalized input).
template <typename Scalar>
std::pair<Mps<Scalar>, double> dense_to_mps(
    const Eigen::Vector<Scalar, Eigen::Dynamic>& psi, int d) {
  std::int64_t dim = psi.size();
  int n = 0;
  std::int64_t p = 1;
  while (p < dim) {
    p *= d;
    ++n;
  }
  if (dim < 2 || p != dim)
    throw std::invalid_argument("dense_to_mps: length is not a power of d");

  Mps<Scalar> mps;
  mps.sites.reserve(n);
  // Working matrix: rows (chi * d) combine the carried bond with the current
  // site; columns hold the remaining sites. Qubit 0 varies fastest, so the
  // first reshape is column-major with d rows.
  Mat<Scalar> work =
      Eigen::Map<const Mat<Scalar>>(psi.data(), d, dim / d);
  for (int i = 0; i < n; ++i) {
    // Rows of `work` are indexed (s_i * chi + alpha) after the regrouping
    // below, matching the left matricization convention.
    auto svd = detail::thin_svd(work);
    const int rank = static_cast<int>(svd.s.size());
    mps.sites.push_back(detail::unstack_left(svd.u, d));
    if (i + 1 == n) {
      // 1x1 remainder: a phase times the norm.
      const Scalar rem = svd.s(0) * svd.vh(0, 0);
      const double nrm = std::abs(rem);
      if (nrm > 0.0)
        for (auto& m : mps.sites.back()) m *= rem / Scalar(nrm);
      mps.norm_factor = Scalar(1);
      mps.canonical = CanonicalState::Left;
      return {std::move(mps), nrm};
    }
    Mat<Scalar> carry = svd.s.template cast<Scalar>().asDiagonal() * svd.vh;
    // carry: rank x (d^{n-i-1} columns, next site fastest). Regroup into
    // (rank*d) x d^{n-i-2} with rows (s*rank + alpha).
    const std::int64_t rest = carry.cols() / d;
    Mat<Scalar> next(rank * d, rest);
    for (int s = 0; s < d; ++s)
      for (std::int64_t r = 0; r < rest; ++r)
        next.block(s * rank, r, rank, 1) = carry.col(r * d + s);
    work = std::move(next);
  }
  throw std::logic_error("dense_to_mps: unreachable");
}

/// Contracts an MPS back into its dense amplitude vector (small N only).
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> mps_to_dense(const Mps<Scalar>& mps) {
  const int n = mps.n_sites();
  const int d = mps.phys_dim();
  std::int64_t dim = 1;
  for (int i = 0; i < n; ++i) dim *= d;
  if (dim > (std::int64_t{1} << 24))
    throw std::invalid_argument("mps_to_dense: state too large");
  // prefix(q, :) holds the partial contraction for configuration index q.
  Mat<Scalar> prefix = Mat<Scalar>::Ones(1, 1);
  std::int64_t covered = 1;
  for (int i = 0; i < n; ++i) {
    const int chi_r = static_cast<int>(mps.sites[i][0].cols());
    Mat<Scalar> next(covered * d, chi_r);
    for (int s = 0; s < d; ++s)
      next.middleRows(s * covered, covered) = prefix * mps.sites[i][s];
    // Row order: index = old_index + s * covered, i.e. site i contributes
    // the digit of weight d^i.
    prefix = std::move(next);
    covered *= d;
  }
  return mps.norm_factor * prefix.col(0);
}

/// <a|b> by transfer-matrix contraction, O(N chi^3 d).
template <typename Scalar>
Scalar mps_inner(const Mps<Scalar>& a, const Mps<Scalar>& b) {
  if (a.n_sites() != b.n_sites() || a.phys_dim() != b.phys_dim())
    throw std::invalid_argument("mps_inner: shape mismatch");
  const int d = a.phys_dim();
  Mat<Scalar> env = Mat<Scalar>::Ones(1, 1);
  for (int i = 0; i < a.n_sites(); ++i) {
    Mat<Scalar> next = Mat<Scalar>::Zero(a.sites[i][0].cols(),
                                         b.sites[i][0].cols());
    for (int s = 0; s < d; ++s)
      next += a.sites[i][s].adjoint() * env * b.sites[i][s];
    env = std::move(next);
  }
  return detail::conj_scalar(a.norm_factor) * b.norm_factor * env(0, 0);
}

/// Left-canonicalizes every tensor by a left-to-right SVD sweep; the final
/// scalar remainder moves into norm_factor, so the represented state is
/// unchanged.
template <typename Scalar>
Mps<Scalar> left_canonicalize(const Mps<Scalar>& in) {
  Mps<Scalar> out = in;
  const int d = in.phys_dim();
  Mat<Scalar> carry = Mat<Scalar>::Identity(1, 1);
  for (int i = 0; i < in.n_sites(); ++i) {
    SiteTensor<Scalar> cur(d);
    for (int s = 0; s < d; ++s) cur[s] = carry * in.sites[i][s];
    auto svd = detail::thin_svd(detail::stack_left(cur));
    out.sites[i] = detail::unstack_left(svd.u, d);
    carry = svd.s.template cast<Scalar>().asDiagonal() * svd.vh;
  }
  out.norm_factor = in.norm_factor * carry(0, 0);
  out.canonical = CanonicalState::Left;
  return out;
}

/// Right-to-left SVD sweep; mirror image of left_canonicalize.
template <typename Scalar>
Mps<Scalar> right_canonicalize(const Mps<Scalar>& in) {
  Mps<Scalar> out = in;
  const int d = in.phys_dim();
  Mat<Scalar> carry = Mat<Scalar>::Identity(1, 1);
  for (int i = in.n_sites() - 1; i >= 0; --i) {
    SiteTensor<Scalar> cur(d);
    for (int s = 0; s < d; ++s) cur[s] = in.sites[i][s] * carry;
    auto svd = detail::thin_svd(detail::stack_right(cur));
    out.sites[i] = detail::unstack_right(svd.vh, d);
    carry = svd.u * svd.s.template cast<Scalar>().asDiagonal();
  }
  out.norm_factor = in.norm_factor * carry(0, 0);
  out.canonical = CanonicalState::Right;
  return out;
}

/// Mixed canonical form with the weight vector at bond `center`
/// (0 <= center <= N). The singular values are the Schmidt coefficients of
/// the cut, including the state norm.
template <typename Scalar>
MixedCanonical<Scalar> mixed_canonicalize(const Mps<Scalar>& in, int center) {
  const int n = in.n_sites();
  if (center < 0 || center > n)
    throw std::invalid_argument("mixed_canonicalize: center out of range");
  const int d = in.phys_dim();
  Mps<Scalar> rc = right_canonicalize(in);
  MixedCanonical<Scalar> out;
  out.center = center;
  Mat<Scalar> carry = Mat<Scalar>::Identity(1, 1);
  carry(0, 0) = rc.norm_factor;
  for (int i = 0; i < center; ++i) {
    SiteTensor<Scalar> cur(d);
    for (int s = 0; s < d; ++s) cur[s] = carry * rc.sites[i][s];
    auto svd = detail::thin_svd(detail::stack_left(cur));
    out.left.push_back(detail::unstack_left(svd.u, d));
    carry = svd.s.template cast<Scalar>().asDiagonal() * svd.vh;
  }
  // carry = diag(lambda) * unitary; absorb the unitary into the right part.
  auto svd = detail::thin_svd(carry);
  if (center > 0) {
    for (int s = 0; s < d; ++s)
      out.left.back()[s] = out.left.back()[s] * svd.u;
  }
  out.lambda = svd.s;
  for (int i = center; i < n; ++i) {
    SiteTensor<Scalar> cur(d);
    for (int s = 0; s < d; ++s)
      cur[s] = (i == center) ? Mat<Scalar>(svd.vh * rc.sites[i][s])
                             : rc.sites[i][s];
    out.right.push_back(std::move(cur));
  }
  if (center == 0) {
    // svd.u is a 1x1 phase; keep it with the weight by pushing it right.
    for (int s = 0; s < d; ++s) out.right.front()[s] *= svd.u(0, 0);
  } else if (center == n) {
    // No right part to absorb the trailing phase of the 1x1 carry.
    for (int s = 0; s < d; ++s) out.left.back()[s] *= svd.vh(0, 0);
  }
  return out;
}

template <typename Scalar>
Mps<Scalar> MixedCanonical<Scalar>::to_mps() const {
  Mps<Scalar> out;
  out.sites = left;
  for (std::size_t i = 0; i < right.size(); ++i) {
    SiteTensor<Scalar> cur = right[i];
    if (i == 0)
      for (auto& m : cur)
        m = lambda.template cast<Scalar>().asDiagonal() * m;
    out.sites.push_back(std::move(cur));
  }
  if (right.empty())  // center at the last cut: weights fold leftward
    for (auto& m : out.sites.back())
      m = m * lambda.template cast<Scalar>().asDiagonal();
  out.canonical = CanonicalState::Mixed;
  return out;
}

/// Vidal decomposition Gamma[i] = inv(diag(lambda[i])) * A[i]. Throws a
/// degeneracy error when an interior weight falls below `threshold` relative
/// to the largest weight on that bond.
template <typename Scalar>
GammaLambda<Scalar> gamma_lambda(const Mps<Scalar>& in,
                                 double threshold = 1e-12) {
  const int n = in.n_sites();
  const int d = in.phys_dim();
  Mps<Scalar> rc = right_canonicalize(in);
  GammaLambda<Scalar> out;
  out.lambda.resize(n + 1);
  out.lambda[0] = Eigen::VectorXd::Ones(1) * std::abs(rc.norm_factor);
  Mat<Scalar> carry = Mat<Scalar>::Identity(1, 1);
  carry(0, 0) = rc.norm_factor;
  Eigen::VectorXd prev = out.lambda[0];
  for (int i = 0; i < n; ++i) {
    SiteTensor<Scalar> cur(d);
    for (int s = 0; s < d; ++s) cur[s] = carry * rc.sites[i][s];
    auto svd = detail::thin_svd(detail::stack_left(cur));
    SiteTensor<Scalar> a = detail::unstack_left(svd.u, d);
    if (prev.minCoeff() < threshold * prev.maxCoeff())
      throw std::runtime_error(
          "gamma_lambda: bond weight below pseudo-inverse threshold");
    SiteTensor<Scalar> g(d);
    for (int s = 0; s < d; ++s)
      g[s] = prev.cwiseInverse().template cast<Scalar>().asDiagonal() * a[s];
    out.gamma.push_back(std::move(g));
    out.lambda[i + 1] = svd.s;
    prev = svd.s;
    carry = svd.s.template cast<Scalar>().asDiagonal() * svd.vh;
  }
  // The trailing 1x1 carry is a phase times the norm already in lambda[n].
  return out;
}

/// Product state |b_0 b_1 ... b_{N-1}> as a bond-dimension-1 MPS.
template <typename Scalar>
Mps<Scalar> product_mps(const std::vector<int>& levels, int d) {
  Mps<Scalar> mps;
  for (int b : levels) {
    if (b < 0 || b >= d)
      throw std::invalid_argument("product_mps: level out of range");
    SiteTensor<Scalar> t(d, Mat<Scalar>::Zero(1, 1));
    t[b](0, 0) = Scalar(1);
    mps.sites.push_back(std::move(t));
  }
  return mps;
}

/// Superposition a + b by block-diagonal bond concatenation.
template <typename Scalar>
Mps<Scalar> mps_add(const Mps<Scalar>& a, const Mps<Scalar>& b) {
  if (a.n_sites() != b.n_sites() || a.phys_dim() != b.phys_dim())
    throw std::invalid_argument("mps_add: shape mismatch");
  const int n = a.n_sites();
  const int d = a.phys_dim();
  Mps<Scalar> out;
  for (int i = 0; i < n; ++i) {
    SiteTensor<Scalar> t(d);
    for (int s = 0; s < d; ++s) {
      const Mat<Scalar>& ma = a.sites[i][s];
      const Mat<Scalar>& mb = b.sites[i][s];
      if (n == 1) {
        t[s] = a.norm_factor * ma + b.norm_factor * mb;
      } else if (i == 0) {
        t[s] = Mat<Scalar>::Zero(1, ma.cols() + mb.cols());
        t[s].leftCols(ma.cols()) = a.norm_factor * ma;
        t[s].rightCols(mb.cols()) = b.norm_factor * mb;
      } else if (i == n - 1) {
        t[s] = Mat<Scalar>::Zero(ma.rows() + mb.rows(), 1);
        t[s].topRows(ma.rows()) = ma;
        t[s].bottomRows(mb.rows()) = mb;
      } else {
        t[s] = Mat<Scalar>::Zero(ma.rows() + mb.rows(), ma.cols() + mb.cols());
        t[s].topLeftCorner(ma.rows(), ma.cols()) = ma;
        t[s].bottomRightCorner(mb.rows(), mb.cols()) = mb;
      }
    }
    out.sites.push_back(std::move(t));
  }
  return out;
}

/// Random MPS with bond dimension min(chi, d^cut, d^(N-cut)) and Gaussian
/// entries; deterministic for a fixed seed.
template <typename Scalar>
Mps<Scalar> random_mps(int n_sites, int d, int chi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto draw = [&]() {
    if constexpr (std::is_same_v<Scalar, double>) return g(rng);
    else return Scalar(g(rng), g(rng));
  };
  auto cap = [&](int cut) {
    double full = 1.0;
    for (int k = 0; k < std::min(cut, n_sites - cut); ++k) {
      full *= d;
      if (full >= chi) return chi;
    }
    return static_cast<int>(full);
  };
  Mps<Scalar> mps;
  for (int i = 0; i < n_sites; ++i) {
    const int cl = cap(i), cr = cap(i + 1);
    SiteTensor<Scalar> t(d);
    for (int s = 0; s < d; ++s) {
      t[s] = Mat<Scalar>(cl, cr);
      for (int a = 0; a < cl; ++a)
        for (int b = 0; b < cr; ++b) t[s](a, b) = draw();
    }
    mps.sites.push_back(std::move(t));
  }
  return mps;
}

/// Residual of the left canonical condition, max over sites.
template <typename Scalar>
double left_canonical_residual(const Mps<Scalar>& mps) {
  double worst = 0.0;
  const int d = mps.phys_dim();
  for (int i = 0; i < mps.n_sites(); ++i) {
    const int chi_r = static_cast<int>(mps.sites[i][0].cols());
    Mat<Scalar> acc = Mat<Scalar>::Zero(chi_r, chi_r);
    for (int s = 0; s < d; ++s)
      acc += mps.sites[i][s].adjoint() * mps.sites[i][s];
    worst = std::max(
        worst, (acc - Mat<Scalar>::Identity(chi_r, chi_r)).cwiseAbs().maxCoeff());
  }
  return worst;
}

template <typename Scalar>
double right_canonical_residual(const Mps<Scalar>& mps) {
  double worst = 0.0;
  const int d = mps.phys_dim();
  for (int i = 0; i < mps.n_sites(); ++i) {
    const int chi_l = static_cast<int>(mps.sites[i][0].rows());
    Mat<Scalar> acc = Mat<Scalar>::Zero(chi_l, chi_l);
    for (int s = 0; s < d; ++s)
      acc += mps.sites[i][s] * mps.sites[i][s].adjoint();
    worst = std::max(
        worst, (acc - Mat<Scalar>::Identity(chi_l, chi_l)).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Versioned textual checkpoint; 17 significant digits make the round trip
/// bit-exact for IEEE doubles.
template <typename Scalar>
void save_mps(std::ostream& out, const Mps<Scalar>& mps) {
  out.precision(17);
  out << "vqs-mps 1 " << (std::is_same_v<Scalar, double> ? "real" : "complex")
      << "\n";
  out << mps.n_sites() << " " << mps.phys_dim() << " "
      << static_cast<int>(mps.canonical) << "\n";
  using std::imag;
  using std::real;
  out << real(mps.norm_factor) << " " << imag(mps.norm_factor) << "\n";
  for (int i = 0; i < mps.n_sites(); ++i) {
    const auto& t = mps.sites[i];
    out << t[0].rows() << " " << t[0].cols() << "\n";
    for (std::size_t s = 0; s < t.size(); ++s)
      for (int r = 0; r < t[s].rows(); ++r) {
        for (int c = 0; c < t[s].cols(); ++c) {
          if (c) out << " ";
          out << real(t[s](r, c));
          if constexpr (!std::is_same_v<Scalar, double>)
            out << " " << imag(t[s](r, c));
        }
        out << "\n";
      }
  }
}

template <typename Scalar>
Mps<Scalar> load_mps(std::istream& in) {
  std::string magic, kind;
  int version = 0;
  in >> magic >> version >> kind;
  if (magic != "vqs-mps" || version != 1)
    throw std::runtime_error("load_mps: unrecognized checkpoint header");
  const bool want_real = std::is_same_v<Scalar, double>;
  if (want_real != (kind == "real"))
    throw std::runtime_error("load_mps: scalar kind mismatch");
  int n, d, canon;
  in >> n >> d >> canon;
  double nr, ni;
  in >> nr >> ni;
  Mps<Scalar> mps;
  if constexpr (std::is_same_v<Scalar, double>) mps.norm_factor = nr;
  else mps.norm_factor = Scalar(nr, ni);
  mps.canonical = static_cast<CanonicalState>(canon);
  for (int i = 0; i < n; ++i) {
    int rows, cols;
    in >> rows >> cols;
    SiteTensor<Scalar> t(d, Mat<Scalar>(rows, cols));
    for (int s = 0; s < d; ++s)
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          double re, im = 0.0;
          in >> re;
          if constexpr (!std::is_same_v<Scalar, double>) in >> im;
          if constexpr (std::is_same_v<Scalar, double>) t[s](r, c) = re;
          else t[s](r, c) = Scalar(re, im);
        }
    mps.sites.push_back(std::move(t));
  }
  if (!in) throw std::runtime_error("load_mps: truncated checkpoint");
  return mps;
}

}  // namespace vqs
