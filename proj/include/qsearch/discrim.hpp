#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qsearch/statevec.hpp"

namespace qsearch::discrim {

// Cyclic shift T: amplitude of |x> moves to |(x+1) mod N>. T^N = I.
StateVector shift_apply(const StateVector& s);

// Eigenvector of T with eigenvalue exp(i*2*pi*a/N):
// gamma_a[y] = exp(-i*2*pi*a*y/N) / sqrt(N).
StateVector fourier_vector(std::size_t n, std::size_t a);

// psi_x(m) = T^x psi_0(m), with psi_0(m) produced by gate iteration for the
// marked element 0.
StateVector symmetric_state(std::size_t n, std::size_t x, std::size_t m);

// The two terms whose minimum bounds unambiguous discrimination:
// |cos(m*omega)| and |sin(m*omega)|/sqrt(N-1). The cosine term is evaluated
// as sin((m0 + 1/2 - m)*omega) so the dip at m0 + 1/2 is an exact zero.
struct UnambTerms {
  double cos_term = 0.0;
  double sin_term = 0.0;
};
UnambTerms unamb_terms(std::size_t n, double m);

// Upper bound on the unambiguous success probability:
// N * min{cos^2(m*omega), sin^2(m*omega)/(N-1)}. Accepts fractional m.
double unamb_bound(std::size_t n, double m);

// Brute-force route to the same bound at integer m: N * min_a |<gamma_a|psi_0(m)>|^2
// with psi_0(m) from gate iteration.
double unamb_bound_numeric(std::size_t n, std::size_t m);

// (m0, m0+1): the two real step counts where the family becomes orthogonal
// and both discrimination schemes reach certainty.
std::pair<double, double> crossing_points(std::size_t n);

// Optimal minimum-error success probability for the symmetric family:
// (|cos(m*omega)| + sqrt(N-1)*|sin(m*omega)|)^2 / N, which equals
// sin^2((2m+1)w/2) up to m0+1/2 and sin^2((2m-1)w/2) beyond.
double minerr_prob(std::size_t n, double m);

struct MinErrNumeric {
  double p_success = 0.0;
  // max |Omega_bruteforce - Omega_closed_form| (validated <= 1e-10 internally).
  double omega_deviation = 0.0;
  // max |M*Omega*M - support projector| for M = Omega^{-1/2}.
  double sqrt_identity_deviation = 0.0;
  std::optional<Povm> povm;  // square-root measurement, when requested
};

// Dense numeric route: builds Omega = sum_x |psi_x><psi_x| from the N
// symmetric states, checks it against the closed-form spectral expression,
// and evaluates |<psi_0|Omega^{-1/2}|psi_0>|^2. The square-root-measurement
// effects Omega^{-1/2}|psi_x><psi_x|Omega^{-1/2} are materialized only when
// build_povm is set (they occupy N^3 complex entries). n <= 4096.
MinErrNumeric minerr_numeric(std::size_t n, std::size_t m, bool build_povm = true);

struct SweepRow {
  double m = 0.0;
  double p_grover = 0.0;
  double gamma0_bound = 0.0;
  double p_minerr = 0.0;
  double cos_term = 0.0;
  double sin_term = 0.0;
};

// One row per requested abscissa, in input order. At integer m with
// n <= 512 the closed forms are cross-checked against the numeric routes;
// a mismatch throws. The dense square-root-measurement route carries more
// rounding than the overlap minimum, hence its wider default.
std::vector<SweepRow> sweep(std::size_t n, const std::vector<double>& m_values,
                            double bound_check_tol = 1e-10,
                            double minerr_check_tol = 1e-8);

}  // namespace qsearch::discrim
