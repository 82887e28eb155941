#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "qsearch/statevec.hpp"

namespace qsearch::test {

inline void check_state_near(const StateVector& actual, const StateVector& expected,
                             double tol = 1e-10) {
  REQUIRE(actual.dim() == expected.dim());
  for (std::size_t i = 0; i < actual.dim(); ++i) {
    INFO("index ", i);
    CHECK(std::abs(actual[i] - expected[i]) <= tol);
  }
}

// Dense matrix of a linear map, column by column.
inline Eigen::MatrixXcd dense_of(const std::function<StateVector(const StateVector&)>& op,
                                 std::size_t dim) {
  const auto ni = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd m(ni, ni);
  for (std::size_t j = 0; j < dim; ++j) {
    const StateVector col = op(StateVector::basis(dim, j));
    REQUIRE(col.dim() == dim);
    for (std::size_t i = 0; i < dim; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
  }
  return m;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline double unitarity_deviation(const Eigen::MatrixXcd& m) {
  return max_abs(m.adjoint() * m -
                 Eigen::MatrixXcd::Identity(m.rows(), m.cols()));
}

inline StateVector random_state(std::size_t dim, std::mt19937_64& rng) {
  std::vector<cxd> amps(dim);
  for (auto& a : amps) {
    a = cxd{2.0 * uniform_double(rng) - 1.0, 2.0 * uniform_double(rng) - 1.0};
  }
  return StateVector::raw(std::move(amps)).normalized();
}

inline HermitianOperator random_psd(std::size_t dim, std::mt19937_64& rng) {
  const auto ni = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd a(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      a(i, j) = cxd{2.0 * uniform_double(rng) - 1.0, 2.0 * uniform_double(rng) - 1.0};
    }
  }
  Eigen::MatrixXcd psd = a * a.adjoint();
  psd = 0.5 * (psd + psd.adjoint()).eval();
  return HermitianOperator(std::move(psd));
}

// Pearson statistic of observed counts against expected probabilities.
inline double chi_square_statistic(const std::vector<std::size_t>& counts,
                                   const std::vector<double>& probs,
                                   std::size_t draws) {
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(draws);
    if (expected == 0.0) {
      REQUIRE(counts[i] == 0);
      continue;
    }
    const double d = static_cast<double>(counts[i]) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// 0.999 quantiles of the chi-square distribution (p > 0.001 acceptance).
inline double chi_square_q999(std::size_t df) {
  switch (df) {
    case 3:
      return 16.26623619623813;
    case 7:
      return 24.321886347856854;
    case 15:
      return 37.69729821835383;
    default:
      FAIL("no frozen quantile for df = ", df);
      return 0.0;
  }
}

}  // namespace qsearch::test
