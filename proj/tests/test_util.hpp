#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "pingpong/qstate.hpp"

namespace test {

// Property suites run under each of these.
inline constexpr std::array<std::uint64_t, 3> kSeeds{20160607, 1337, 8};

inline void expect_amps(const pingpong::StateVector& s, const std::vector<pingpong::complex>& ref, double tol = 1e-12) {
  ASSERT_EQ(s.dim(), ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(s[i].real(), ref[i].real(), tol) << "i=" << i << " (real)";
    EXPECT_NEAR(s[i].imag(), ref[i].imag(), tol) << "i=" << i << " (imag)";
  }
}

inline void expect_matrix_near(const pingpong::Matrix& a, const pingpong::Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), tol);
}

}  // namespace test
