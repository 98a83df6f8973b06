#pragma once

// Reference computations written against raw amplitude vectors with explicit
// index loops. None of them call into the library's qcore routines.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Vec = std::vector<C>;
using Mat = std::vector<std::vector<C>>;

inline const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

inline Mat kron(const Mat& a, const Mat& b) {
  const std::size_t n = a.size() * b.size();
  Mat out(n, std::vector<C>(n));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t l = 0; l < b.size(); ++l)
          out[i * b.size() + k][j * b.size() + l] = a[i][j] * b[k][l];
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat out(n, std::vector<C>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Vec apply(const Mat& m, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline Mat identity(std::size_t n) {
  Mat out(n, std::vector<C>(n));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 1.0;
  return out;
}

/// Bit of qubit q (0 = most significant) in an n-qubit index.
inline int bit(std::size_t index, std::size_t q, std::size_t n) {
  return static_cast<int>((index >> (n - 1 - q)) & 1U);
}

inline Vec bell(int which) {
  // 0 psi+, 1 psi-, 2 phi+, 3 phi-
  switch (which) {
    case 0: return {kInvSqrt2, 0, 0, kInvSqrt2};
    case 1: return {kInvSqrt2, 0, 0, -kInvSqrt2};
    case 2: return {0, kInvSqrt2, kInvSqrt2, 0};
    default: return {0, kInvSqrt2, -kInvSqrt2, 0};
  }
}

inline Mat pauli(int which) {
  // 0 I, 1 X, 2 Z, 3 iY = ZX
  switch (which) {
    case 0: return {{1, 0}, {0, 1}};
    case 1: return {{0, 1}, {1, 0}};
    case 2: return {{1, 0}, {0, -1}};
    default: return {{0, 1}, {-1, 0}};
  }
}

/// Reduced density matrix on `keep` (in that order) by summing over every
/// assignment of the traced qubits.
inline Mat partial_trace(const Vec& psi, std::size_t n, const std::vector<std::size_t>& keep) {
  const std::size_t dk = std::size_t{1} << keep.size();
  Mat rho(dk, std::vector<C>(dk));
  for (std::size_t i = 0; i < psi.size(); ++i) {
    for (std::size_t j = 0; j < psi.size(); ++j) {
      bool traced_equal = true;
      for (std::size_t q = 0; q < n && traced_equal; ++q) {
        bool kept = false;
        for (auto k : keep) kept = kept || k == q;
        if (!kept && bit(i, q, n) != bit(j, q, n)) traced_equal = false;
      }
      if (!traced_equal) continue;
      std::size_t ri = 0;
      std::size_t rj = 0;
      for (auto k : keep) {
        ri = (ri << 1) | static_cast<std::size_t>(bit(i, k, n));
        rj = (rj << 1) | static_cast<std::size_t>(bit(j, k, n));
      }
      rho[ri][rj] += psi[i] * std::conj(psi[j]);
    }
  }
  return rho;
}

inline double purity(const Mat& rho) {
  double p = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    for (std::size_t j = 0; j < rho.size(); ++j) p += std::norm(rho[i][j]);
  return p;
}

inline C inner(const Vec& a, const Vec& b) {
  C s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double fidelity(const Vec& a, const Vec& b) { return std::norm(inner(a, b)); }

/// Moves qubit positions: out qubit perm[i] takes input qubit i.
inline Vec reorder(const Vec& psi, std::size_t n, const std::vector<std::size_t>& perm) {
  Vec out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (bit(i, q, n)) j |= std::size_t{1} << (n - 1 - perm[q]);
    }
    out[j] = psi[i];
  }
  return out;
}

/// Unnormalized receiver state when qubits (0,1) of input (x) pair are found
/// in Bell state `outcome`; the pair is given sender qubit first.
inline Vec teleport(const Vec& input, const Vec& pair, int outcome) {
  const Vec joint = kron(input, pair);
  const Vec b = bell(outcome);
  Vec out(2);
  for (std::size_t i = 0; i < 8; ++i) out[i & 1] += std::conj(b[i >> 1]) * joint[i];
  return out;
}

/// Fidelity between a possibly unnormalized single-qubit state and a target.
inline double normalized_fidelity(const Vec& state, const Vec& target) {
  const double n = std::real(inner(state, state));
  return std::norm(inner(target, state)) / n;
}

}  // namespace oracle
