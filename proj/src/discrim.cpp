#include "qsearch/discrim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "qsearch/grover.hpp"

namespace qsearch::discrim {

namespace {

StateVector psi0(std::size_t n, std::size_t m) {
  const auto p = grover::params(n, 1);
  return grover::run(p, grover::MarkedSet(n, {0}), m);
}

StateVector as_state(std::vector<cxd> amps, const char* what) {
  StateVector s = StateVector::raw(std::move(amps));
  if (!s.is_normalized()) {
    throw std::invalid_argument(std::string(what) + ": result is not a unit state");
  }
  return s;
}

bool is_integer(double m, double tol = 1e-9) {
  return m >= 0.0 && std::abs(m - std::round(m)) <= tol;
}

}  // namespace

StateVector shift_apply(const StateVector& s) {
  const std::size_t n = s.dim();
  std::vector<cxd> out(n);
  out[0] = s[n - 1];
  for (std::size_t i = 1; i < n; ++i) out[i] = s[i - 1];
  return as_state(std::move(out), "shift_apply");
}

StateVector fourier_vector(std::size_t n, std::size_t a) {
  if (n == 0) throw std::invalid_argument("fourier_vector: dimension must be positive");
  if (a >= n) throw std::out_of_range("fourier_vector: a out of range");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cxd> amps(n);
  for (std::size_t y = 0; y < n; ++y) {
    const std::size_t k = (a * y) % n;
    const double angle =
        -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    amps[y] = std::polar(scale, angle);
  }
  return as_state(std::move(amps), "fourier_vector");
}

StateVector symmetric_state(std::size_t n, std::size_t x, std::size_t m) {
  if (x >= n) throw std::out_of_range("symmetric_state: x out of range");
  const StateVector base = psi0(n, m);
  if (x == 0) return base;
  // T^x: amplitude of |y> moves to |y+x mod n>
  std::vector<cxd> out(n);
  for (std::size_t y = 0; y < n; ++y) out[(y + x) % n] = base[y];
  return as_state(std::move(out), "symmetric_state");
}

UnambTerms unamb_terms(std::size_t n, double m) {
  if (n < 2) throw std::invalid_argument("unamb_terms: need N >= 2");
  if (m < 0.0) throw std::invalid_argument("unamb_terms: m must be >= 0");
  const auto p = grover::params(n, 1);
  // |cos(m*omega)| via sin((m0 + 1/2 - m)*omega): identical since
  // (m0 + 1/2)*omega = pi/2, and exactly zero at the dip m = m0 + 1/2.
  UnambTerms t;
  t.cos_term = std::abs(std::sin((p.m0 + 0.5 - m) * p.omega));
  t.sin_term = std::abs(std::sin(m * p.omega)) /
               std::sqrt(static_cast<double>(n - 1));
  return t;
}

double unamb_bound(std::size_t n, double m) {
  const UnambTerms t = unamb_terms(n, m);
  const double term = std::min(t.cos_term, t.sin_term);
  return static_cast<double>(n) * term * term;
}

double unamb_bound_numeric(std::size_t n, std::size_t m) {
  if (n < 2) throw std::invalid_argument("unamb_bound_numeric: need N >= 2");
  const StateVector s = psi0(n, m);
  // roots of unity table; <gamma_a|s> = (1/sqrt(N)) sum_y e^{+i 2 pi a y / N} s_y
  std::vector<cxd> root(n);
  for (std::size_t k = 0; k < n; ++k) {
    root[k] = std::polar(
        1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  }
  double min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    cxd acc{0.0, 0.0};
    for (std::size_t y = 0; y < n; ++y) acc += root[(a * y) % n] * s[y];
    min_sq = std::min(min_sq, std::norm(acc));  // == N * |<gamma_a|s>|^2
  }
  return min_sq;
}

std::pair<double, double> crossing_points(std::size_t n) {
  const auto p = grover::params(n, 1);
  return {p.m0, p.m0 + 1.0};
}

double minerr_prob(std::size_t n, double m) {
  const UnambTerms t = unamb_terms(n, m);
  const double amp =
      t.cos_term + static_cast<double>(n - 1) * t.sin_term;  // |cos| + sqrt(N-1)|sin|
  return amp * amp / static_cast<double>(n);
}

MinErrNumeric minerr_numeric(std::size_t n, std::size_t m, bool build_povm) {
  if (n < 2) throw std::invalid_argument("minerr_numeric: need N >= 2");
  if (n > 4096) {
    throw std::invalid_argument(
        "minerr_numeric: dense path limited to N <= 4096; use minerr_prob");
  }
  const auto p = grover::params(n, 1);
  const StateVector base = psi0(n, m);
  const auto ni = static_cast<Eigen::Index>(n);

  // columns are the cyclic shifts psi_x(m) = T^x psi_0(m)
  Eigen::MatrixXcd states(ni, ni);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      states(static_cast<Eigen::Index>((y + x) % n), static_cast<Eigen::Index>(x)) =
          base[y];
    }
  }
  Eigen::MatrixXcd omega = states * states.adjoint();

  // N cos^2(mw) |ybar><ybar| + N/(N-1) sin^2(mw) (I - |ybar><ybar|)
  const double mw = static_cast<double>(m) * p.omega;
  const double on_uniform = static_cast<double>(n) * std::cos(mw) * std::cos(mw);
  const double off_uniform = static_cast<double>(n) /
                             static_cast<double>(n - 1) * std::sin(mw) * std::sin(mw);
  MinErrNumeric out;
  {
    const double shared = (on_uniform - off_uniform) / static_cast<double>(n);
    double dev = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = 0; j < ni; ++j) {
        const double expected_re = shared + (i == j ? off_uniform : 0.0);
        dev = std::max(dev, std::abs(omega(i, j).real() - expected_re));
        dev = std::max(dev, std::abs(omega(i, j).imag()));
      }
    }
    out.omega_deviation = dev;
  }
  if (out.omega_deviation > 1e-10) {
    throw std::runtime_error(
        "minerr_numeric: brute-force Omega deviates from its closed form by " +
        std::to_string(out.omega_deviation));
  }

  omega = 0.5 * (omega + omega.adjoint()).eval();
  const SpectralInvSqrt spec =
      inv_sqrt_on_support_spectral(HermitianOperator(std::move(omega)));
  const Eigen::MatrixXcd& msqrt = spec.inv_sqrt.matrix();

  const Eigen::VectorXcd v0 = base.as_eigen();
  out.p_success = std::norm((v0.adjoint() * msqrt * v0).value());

  // M Omega M == M (Psi Psi^+) M == sum of the square-root-measurement effects
  const Eigen::MatrixXcd scaled = msqrt * states;
  out.sqrt_identity_deviation =
      (scaled * scaled.adjoint() - spec.support).cwiseAbs().maxCoeff();

  if (build_povm) {
    std::vector<HermitianOperator> effects;
    effects.reserve(n);
    for (Eigen::Index x = 0; x < ni; ++x) {
      const Eigen::VectorXcd col = scaled.col(x);
      effects.emplace_back(col * col.adjoint());
    }
    out.povm.emplace(std::move(effects), spec.support);
  }
  return out;
}

std::vector<SweepRow> sweep(std::size_t n, const std::vector<double>& m_values,
                            double bound_check_tol, double minerr_check_tol) {
  if (n < 2) throw std::invalid_argument("sweep: need N >= 2");
  if (bound_check_tol <= 0.0 || minerr_check_tol <= 0.0) {
    throw std::invalid_argument("sweep: cross-check tolerances must be positive");
  }
  const auto p = grover::params(n, 1);
  std::vector<SweepRow> rows;
  rows.reserve(m_values.size());
  for (const double m : m_values) {
    if (m < 0.0) throw std::invalid_argument("sweep: m must be >= 0");
    SweepRow row;
    row.m = m;
    row.p_grover = grover::success_prob(p, m);
    const UnambTerms t = unamb_terms(n, m);
    row.cos_term = t.cos_term;
    row.sin_term = t.sin_term;
    row.gamma0_bound = unamb_bound(n, m);
    row.p_minerr = minerr_prob(n, m);

    if (n <= 512 && is_integer(m)) {
      const auto mi = static_cast<std::size_t>(std::llround(m));
      const double numeric_bound = unamb_bound_numeric(n, mi);
      if (std::abs(numeric_bound - row.gamma0_bound) > bound_check_tol) {
        throw std::runtime_error("sweep: unambiguous bound mismatch at m = " +
                                 std::to_string(mi));
      }
      const double numeric_minerr = minerr_numeric(n, mi, false).p_success;
      if (std::abs(numeric_minerr - row.p_minerr) > minerr_check_tol) {
        throw std::runtime_error("sweep: minimum-error mismatch at m = " +
                                 std::to_string(mi));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qsearch::discrim
