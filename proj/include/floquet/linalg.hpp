#pragma once

// Dense complex kernel: inverse, spectrum, matrix exponential and principal
// logarithm. Everything is templated on the real type so the same code runs
// in double and long double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "floquet/error.hpp"
#include "floquet/types.hpp"

namespace floquet::linalg {

template <typename Real>
struct SpectrumT {
  /// Sorted by descending modulus, then ascending argument.
  std::vector<std::complex<Real>> eigenvalues;
  /// Right eigenvectors as columns, present only when every eigenpair meets
  /// the residual contract with linearly independent vectors.
  std::optional<CMatrixT<Real>> eigenvectors;
  /// |V|_1 |V^-1|_1 of the eigenvector matrix; infinity when defective.
  Real condition_estimate = std::numeric_limits<Real>::infinity();
};

using Spectrum = SpectrumT<double>;

template <typename Real>
Real norm1(const CMatrixT<Real>& m) {
  if (m.size() == 0) return Real(0);
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// Induced 1-norm (maximum column sum) of a real matrix.
inline double norm1(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Real>
CMatrixT<Real> identity(Eigen::Index n) {
  return CMatrixT<Real>::Identity(n, n);
}

/// Principal logarithm ln|z| + i arg z with arg in (-pi, pi]. Values within
/// a few ulps of the negative real axis are put on the +pi side.
template <typename Real>
std::complex<Real> principal_log(std::complex<Real> z) {
  if (z == std::complex<Real>(0)) throw SingularMatrixError("logarithm of zero");
  Real arg = std::arg(z);
  if (z.real() < 0 && std::abs(z.imag()) <= 8 * std::numeric_limits<Real>::epsilon() * std::abs(z))
    arg = std::numbers::pi_v<Real>;
  return {std::log(std::abs(z)), arg};
}

/// Ordering used for every reported spectrum: descending modulus, then
/// ascending argument. Moduli equal to 1e-10 relative count as ties.
template <typename Real>
bool spectral_before(const std::complex<Real>& a, const std::complex<Real>& b) {
  const Real ma = std::abs(a), mb = std::abs(b);
  const Real tie = Real(1e-10) * std::max({Real(1), ma, mb});
  if (std::abs(ma - mb) > tie) return ma > mb;
  return std::arg(a) < std::arg(b);
}

template <typename Real>
void sort_spectrum(std::vector<std::complex<Real>>& values) {
  std::stable_sort(values.begin(), values.end(), spectral_before<Real>);
}

/// Inverse by LU with partial pivoting. Throws SingularMatrixError when a
/// pivot falls below 1e-14 |M|_1.
template <typename Real>
CMatrixT<Real> inv(const CMatrixT<Real>& m) {
  if (m.rows() != m.cols()) throw InputError("inv: matrix must be square");
  const Real scale = norm1(m);
  Eigen::PartialPivLU<CMatrixT<Real>> lu(m);
  const Real min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > Real(1e-14) * scale)) throw SingularMatrixError("inv: matrix is singular to working tolerance");
  return lu.inverse();
}

namespace detail {

template <typename Real>
struct Givens {
  Real c;
  std::complex<Real> s;
};

// Rotation G with G [a; b] = [r; 0].
template <typename Real>
Givens<Real> make_givens(std::complex<Real> a, std::complex<Real> b) {
  const Real abs_a = std::abs(a);
  if (abs_a == Real(0)) return {Real(0), std::complex<Real>(1)};
  const Real norm = std::hypot(abs_a, std::abs(b));
  const std::complex<Real> phase = a / abs_a;
  return {abs_a / norm, phase * std::conj(b) / norm};
}

template <typename Real>
std::pair<std::complex<Real>, std::complex<Real>> eig2x2(std::complex<Real> a, std::complex<Real> b,
                                                          std::complex<Real> c, std::complex<Real> d) {
  const std::complex<Real> mean = (a + d) / Real(2);
  const std::complex<Real> half_diff = (a - d) / Real(2);
  const std::complex<Real> disc = std::sqrt(half_diff * half_diff + b * c);
  const std::complex<Real> det = a * d - b * c;
  std::complex<Real> big = mean + disc;
  if (std::abs(mean - disc) > std::abs(big)) big = mean - disc;
  if (big == std::complex<Real>(0)) return {big, big};
  return {big, det / big};
}

// Householder reduction to upper Hessenberg form (similarity, in place).
template <typename Real>
void hessenberg_reduce(CMatrixT<Real>& h) {
  using C = std::complex<Real>;
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    Eigen::Matrix<C, Eigen::Dynamic, 1> v = h.block(k + 1, k, len, 1);
    const Real alpha_norm = v.norm();
    if (alpha_norm == Real(0)) continue;
    const C x0 = v(0);
    const C phase = std::abs(x0) == Real(0) ? C(1) : x0 / std::abs(x0);
    v(0) += phase * alpha_norm;
    const Real vnorm = v.norm();
    if (vnorm == Real(0)) continue;
    v /= vnorm;
    // H <- (I - 2vv*) H (I - 2vv*)
    auto rows = h.block(k + 1, 0, len, n);
    rows -= Real(2) * v * (v.adjoint() * rows);
    auto cols = h.block(0, k + 1, n, len);
    cols -= Real(2) * (cols * v) * v.adjoint();
    for (Eigen::Index i = k + 2; i < n; ++i) h(i, k) = C(0);
  }
}

// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
template <typename Real>
std::vector<std::complex<Real>> hessenberg_qr(CMatrixT<Real> h) {
  using C = std::complex<Real>;
  const Eigen::Index n = h.rows();
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real hnorm = std::max(norm1<Real>(h), std::numeric_limits<Real>::min());
  const long max_iterations = 100L * static_cast<long>(n) * static_cast<long>(n);
  std::vector<C> values;
  values.reserve(static_cast<std::size_t>(n));

  Eigen::Index hi = n - 1;
  long total = 0;
  int since_deflation = 0;
  std::vector<Givens<Real>> rotations(static_cast<std::size_t>(n));
  while (hi >= 0) {
    if (hi == 0) {
      values.push_back(h(0, 0));
      break;
    }
    Eigen::Index lo = hi;
    while (lo > 0) {
      Real local = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (local == Real(0)) local = hnorm;
      if (std::abs(h(lo, lo - 1)) <= eps * local) {
        h(lo, lo - 1) = C(0);
        break;
      }
      --lo;
    }
    if (lo == hi) {
      values.push_back(h(hi, hi));
      --hi;
      since_deflation = 0;
      continue;
    }
    if (lo == hi - 1) {
      auto [l1, l2] = eig2x2<Real>(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
      values.push_back(l1);
      values.push_back(l2);
      hi -= 2;
      since_deflation = 0;
      continue;
    }
    if (++total > max_iterations) throw NumericalError("eig: QR iteration did not converge");
    ++since_deflation;

    C shift;
    if (since_deflation % 10 == 0) {
      // Exceptional shift to break cycles.
      shift = h(hi, hi) + C(Real(0.75) * std::abs(h(hi, hi - 1)), Real(0.4375) * std::abs(h(hi, hi - 1)));
    } else {
      auto [l1, l2] = eig2x2<Real>(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      shift = std::abs(l1 - h(hi, hi)) <= std::abs(l2 - h(hi, hi)) ? l1 : l2;
    }

    for (Eigen::Index i = lo; i <= hi; ++i) h(i, i) -= shift;
    for (Eigen::Index k = lo; k < hi; ++k) {
      const auto g = make_givens<Real>(h(k, k), h(k + 1, k));
      rotations[static_cast<std::size_t>(k)] = g;
      for (Eigen::Index j = k; j <= hi; ++j) {
        const C x = h(k, j), y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
    }
    for (Eigen::Index k = lo; k < hi; ++k) {
      const auto& g = rotations[static_cast<std::size_t>(k)];
      const Eigen::Index last = std::min(k + 1, hi);
      for (Eigen::Index i = lo; i <= last; ++i) {
        const C x = h(i, k), y = h(i, k + 1);
        h(i, k) = x * g.c + y * std::conj(g.s);
        h(i, k + 1) = -x * g.s + y * g.c;
      }
    }
    for (Eigen::Index i = lo; i <= hi; ++i) h(i, i) += shift;
  }
  return values;
}

// Deterministic start vector for inverse iteration.
template <typename Real>
CVectorT<Real> start_vector(Eigen::Index n, std::uint64_t seed) {
  CVectorT<Real> v(n);
  std::uint64_t state = 0x853c49e6748fea9bULL ^ (seed * 0x9e3779b97f4a7c15ULL);
  auto next = [&state] {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<Real>(state >> 11) * Real(0x1.0p-53) - Real(0.5);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real re = next();
    const Real im = next();
    v(i) = {re + Real(1), im};
  }
  return v.normalized();
}

}  // namespace detail

/// Eigenvalues only (Hessenberg + shifted QR; closed forms for n <= 2).
template <typename Real>
std::vector<std::complex<Real>> eigenvalues(const CMatrixT<Real>& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InputError("eig: matrix must be square and non-empty");
  if (!m.allFinite()) throw InputError("eig: matrix has non-finite entries");
  std::vector<std::complex<Real>> values;
  if (m.rows() == 1) {
    values.push_back(m(0, 0));
  } else if (m.rows() == 2) {
    auto [l1, l2] = detail::eig2x2<Real>(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    values = {l1, l2};
  } else {
    CMatrixT<Real> h = m;
    detail::hessenberg_reduce(h);
    values = detail::hessenberg_qr(std::move(h));
  }
  sort_spectrum(values);
  return values;
}

/// Full spectrum with eigenvectors from inverse iteration. Eigenvalues that
/// coincide to 1e-7 |M| form a cluster whose vectors are kept orthogonal, so
/// semisimple repeated eigenvalues get independent vectors and defective ones
/// fail the residual test (eigenvectors = nullopt, condition = infinity).
template <typename Real>
SpectrumT<Real> eig(const CMatrixT<Real>& m) {
  using C = std::complex<Real>;
  SpectrumT<Real> spectrum;
  spectrum.eigenvalues = eigenvalues(m);
  const Eigen::Index n = m.rows();
  const Real mnorm = m.norm();
  const Real scale = std::max(Real(1), norm1(m));
  const Real cluster_tol = Real(1e-7) * scale;
  const Real residual_tol = Real(1e-8) * std::max(mnorm, std::numeric_limits<Real>::min());

  CMatrixT<Real> vectors(n, n);
  bool ok = true;
  for (Eigen::Index j = 0; j < n && ok; ++j) {
    const C rho = spectrum.eigenvalues[static_cast<std::size_t>(j)];
    std::vector<Eigen::Index> cluster;
    for (Eigen::Index i = 0; i < j; ++i)
      if (std::abs(spectrum.eigenvalues[static_cast<std::size_t>(i)] - rho) <= cluster_tol) cluster.push_back(i);

    Real delta = Real(1e-10) * scale;
    CVectorT<Real> v;
    for (int attempt = 0; attempt < 4; ++attempt, delta *= Real(100)) {
      const CMatrixT<Real> shifted = m - (rho + C(delta, delta / 3)) * identity<Real>(n);
      Eigen::PartialPivLU<CMatrixT<Real>> lu(shifted);
      v = detail::start_vector<Real>(n, static_cast<std::uint64_t>(j));
      for (int it = 0; it < 3; ++it) {
        v = lu.solve(v);
        for (Eigen::Index i : cluster) v -= vectors.col(i) * (vectors.col(i).adjoint() * v)(0);
        const Real len = v.norm();
        if (!(len > Real(0)) || !std::isfinite(len)) break;
        v /= len;
      }
      if (v.allFinite() && v.norm() > Real(0.5)) break;
    }
    if (!v.allFinite()) {
      ok = false;
      break;
    }
    vectors.col(j) = v;
    if ((m * v - rho * v).norm() > residual_tol * v.norm()) ok = false;
  }

  if (ok) {
    Eigen::PartialPivLU<CMatrixT<Real>> lu(vectors);
    const Real min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot > std::numeric_limits<Real>::epsilon() * norm1(vectors)) {
      spectrum.condition_estimate = norm1<Real>(vectors) * norm1<Real>(lu.inverse());
      spectrum.eigenvectors = std::move(vectors);
    }
  }
  return spectrum;
}

/// Matrix exponential: scaling and squaring with the [13/13] Padé approximant,
/// s chosen so that |M / 2^s|_1 <= 5.37.
template <typename Real>
CMatrixT<Real> expm(const CMatrixT<Real>& m) {
  if (m.rows() != m.cols()) throw InputError("expm: matrix must be square");
  const Eigen::Index n = m.rows();
  static constexpr Real b[] = {Real(64764752532480000.0), Real(32382376266240000.0), Real(7771770303897600.0),
                               Real(1187353796428800.0),  Real(129060195264000.0),   Real(10559470521600.0),
                               Real(670442572800.0),      Real(33522128640.0),       Real(1323241920.0),
                               Real(40840800.0),          Real(960960.0),            Real(16380.0),
                               Real(182.0),               Real(1.0)};
  constexpr Real theta13 = Real(5.371920351148152);
  const Real norm = norm1(m);
  int s = 0;
  if (norm > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  const CMatrixT<Real> a = m / std::ldexp(Real(1), s);
  const CMatrixT<Real> id = identity<Real>(n);
  const CMatrixT<Real> a2 = a * a;
  const CMatrixT<Real> a4 = a2 * a2;
  const CMatrixT<Real> a6 = a4 * a2;
  const CMatrixT<Real> u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const CMatrixT<Real> u = a * u_inner;
  const CMatrixT<Real> v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  CMatrixT<Real> r = Eigen::PartialPivLU<CMatrixT<Real>>(v - u).solve(v + u);
  for (int i = 0; i < s; ++i) r = (r * r).eval();
  return r;
}

/// Principal square root by the Denman–Beavers iteration.
template <typename Real>
CMatrixT<Real> sqrtm_denman_beavers(const CMatrixT<Real>& m) {
  const Eigen::Index n = m.rows();
  CMatrixT<Real> y = m;
  CMatrixT<Real> z = identity<Real>(n);
  const Real tol = Real(16) * std::numeric_limits<Real>::epsilon();
  for (int it = 0; it < 100; ++it) {
    CMatrixT<Real> y_next, z_next;
    try {
      y_next = (y + inv(z)) / Real(2);
      z_next = (z + inv(y)) / Real(2);
    } catch (const SingularMatrixError&) {
      throw NumericalError("sqrtm: Denman-Beavers iteration hit a singular iterate");
    }
    const Real change = norm1<Real>(y_next - y);
    y = std::move(y_next);
    z = std::move(z_next);
    if (!y.allFinite()) break;
    if (change <= tol * norm1(y)) return y;
  }
  throw NumericalError("sqrtm: Denman-Beavers iteration did not converge");
}

namespace detail {

// Gauss–Legendre nodes and weights on [0, 1].
template <typename Real>
void gauss_legendre_unit(int m, std::vector<Real>& nodes, std::vector<Real>& weights) {
  nodes.assign(static_cast<std::size_t>(m), Real(0));
  weights.assign(static_cast<std::size_t>(m), Real(0));
  for (int i = 0; i < m; ++i) {
    Real x = std::cos(std::numbers::pi_v<Real> * (Real(i) + Real(0.75)) / (Real(m) + Real(0.5)));
    Real dp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const Real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= std::numeric_limits<Real>::epsilon()) break;
    }
    nodes[static_cast<std::size_t>(i)] = (Real(1) - x) / Real(2);
    weights[static_cast<std::size_t>(i)] = Real(1) / ((Real(1) - x * x) * dp * dp);
  }
}

}  // namespace detail

/// log(I + X) by the [m/m] Padé approximant in partial-fraction form.
template <typename Real>
CMatrixT<Real> log1p_pade(const CMatrixT<Real>& x, int m = 7) {
  std::vector<Real> nodes, weights;
  detail::gauss_legendre_unit<Real>(m, nodes, weights);
  const Eigen::Index n = x.rows();
  CMatrixT<Real> acc = CMatrixT<Real>::Zero(n, n);
  for (int j = 0; j < m; ++j) {
    const CMatrixT<Real> denom = identity<Real>(n) + nodes[static_cast<std::size_t>(j)] * x;
    acc += weights[static_cast<std::size_t>(j)] * Eigen::PartialPivLU<CMatrixT<Real>>(denom).solve(x);
  }
  return acc;
}

/// Principal logarithm by inverse scaling and squaring: repeated
/// Denman–Beavers square roots until |M^(1/2^s) - I|_1 <= 0.3, then the
/// order-7 Padé approximant of log(I + X), scaled by 2^s.
template <typename Real>
CMatrixT<Real> logm_inverse_scaling_squaring(const CMatrixT<Real>& m) {
  const Eigen::Index n = m.rows();
  CMatrixT<Real> x = m;
  int s = 0;
  while (norm1<Real>(x - identity<Real>(n)) > Real(0.3)) {
    if (++s > 64) throw NumericalError("logm: square-root scaling did not reach the Padé region");
    x = sqrtm_denman_beavers(x);
  }
  return std::ldexp(Real(1), s) * log1p_pade<Real>(x - identity<Real>(n));
}

/// Principal logarithm through the eigendecomposition M = V D V^-1.
template <typename Real>
CMatrixT<Real> logm_eigen(const SpectrumT<Real>& spectrum) {
  if (!spectrum.eigenvectors) throw NumericalError("logm: no eigenvector basis");
  const auto& v = *spectrum.eigenvectors;
  const Eigen::Index n = v.rows();
  CVectorT<Real> logs(n);
  for (Eigen::Index i = 0; i < n; ++i) logs(i) = principal_log(spectrum.eigenvalues[static_cast<std::size_t>(i)]);
  return v * logs.asDiagonal() * inv(v);
}

/// Principal matrix logarithm; eigenvalues of the result have imaginary part
/// in (-pi, pi]. Uses the eigendecomposition when its condition estimate is
/// at most 1e8 and inverse scaling and squaring otherwise.
template <typename Real>
CMatrixT<Real> logm_principal(const CMatrixT<Real>& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InputError("logm: matrix must be square and non-empty");
  const SpectrumT<Real> spectrum = eig(m);
  const Real scale = std::max(norm1(m), std::numeric_limits<Real>::min());
  for (const auto& ev : spectrum.eigenvalues)
    if (!(std::abs(ev) > Real(1e-14) * scale)) throw SingularMatrixError("logm: matrix is singular");
  if (spectrum.eigenvectors && spectrum.condition_estimate <= Real(1e8)) return logm_eigen(spectrum);
  return logm_inverse_scaling_squaring(m);
}

/// Real logarithm of M^2 for a real nonsingular M: exp(L) = M^2, L real.
/// Imaginary residue below 1e-9 max(1, |L|_1) is discarded; above it the
/// logarithm cannot be realified (e.g. a purely imaginary multiplier pair).
template <typename Real>
CMatrixT<Real> logm_real_doubled(const CMatrixT<Real>& m) {
  const Real scale = std::max(Real(1), norm1(m));
  if (m.imag().cwiseAbs().maxCoeff() > Real(1e-14) * scale)
    throw InputError("logm_real_doubled: matrix must be real");
  const CMatrixT<Real> real_m = m.real().template cast<std::complex<Real>>();
  CMatrixT<Real> l = logm_principal<Real>(real_m * real_m);
  const Real residue = l.imag().cwiseAbs().maxCoeff();
  if (residue > Real(1e-9) * std::max(Real(1), norm1(l)))
    throw NumericalError("logm_real_doubled: logarithm of M^2 is not real (imaginary residue " +
                         std::to_string(static_cast<double>(residue)) + ")");
  return l.real().template cast<std::complex<Real>>();
}

/// M^k for k >= 0 by repeated squaring.
template <typename Real>
CMatrixT<Real> matrix_power(const CMatrixT<Real>& m, unsigned k) {
  CMatrixT<Real> result = identity<Real>(m.rows());
  CMatrixT<Real> base = m;
  while (k) {
    if (k & 1u) result = (result * base).eval();
    k >>= 1u;
    if (k) base = (base * base).eval();
  }
  return result;
}

}  // namespace floquet::linalg
