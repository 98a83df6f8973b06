#pragma once

#include <vector>

#include <doctest.h>

#include "bcst/error.hpp"
#include "bcst/qcore.hpp"
#include "oracles.hpp"

#define CHECK_BCST_ERROR(expr, expected_code)               \
  do {                                                      \
    bool bcst_thrown_ = false;                              \
    try {                                                   \
      (void)(expr);                                         \
    } catch (const ::bcst::Error& e) {                      \
      bcst_thrown_ = true;                                  \
      CHECK_EQ(::bcst::to_string(e.code()),                 \
               ::bcst::to_string(expected_code));           \
    }                                                       \
    CHECK_MESSAGE(bcst_thrown_, "expected " #expected_code); \
  } while (false)

namespace test {

inline oracle::Vec to_vec(const bcst::StateVector& s) {
  return {s.amplitudes().begin(), s.amplitudes().end()};
}

inline bcst::StateVector from_vec(const oracle::Vec& v) { return bcst::StateVector(v); }

inline oracle::Mat to_mat(const Eigen::MatrixXcd& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()),
                  std::vector<oracle::C>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

inline double max_diff(const oracle::Mat& a, const oracle::Mat& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

inline int oracle_index(bcst::BellKind k) { return static_cast<int>(bcst::index_of(k)); }

}  // namespace test
