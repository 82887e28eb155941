#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qsearch {

using cxd = std::complex<double>;

// Tolerance for the unit-norm invariant of states.
inline constexpr double kNormTol = 1e-10;
// Tolerance for Hermiticity of operator entries.
inline constexpr double kHermTol = 1e-12;

/// Dense complex amplitude vector over a finite computational basis.
/// The checked constructor enforces unit norm; `raw` bypasses the check
/// for intermediate arithmetic (e.g. images under non-unitary operators).
class StateVector {
 public:
  explicit StateVector(std::vector<cxd> amps);

  static StateVector raw(std::vector<cxd> amps);
  static StateVector basis(std::size_t dim, std::size_t index);
  static StateVector uniform(std::size_t dim);

  std::size_t dim() const { return amps_.size(); }
  const std::vector<cxd>& amps() const { return amps_; }
  cxd operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  bool is_normalized(double tol = kNormTol) const;
  StateVector normalized() const;

  Eigen::Map<const Eigen::VectorXcd> as_eigen() const {
    return {amps_.data(), static_cast<Eigen::Index>(amps_.size())};
  }

 private:
  StateVector() = default;
  std::vector<cxd> amps_;
};

/// dim x dim complex matrix with entry(i,j) == conj(entry(j,i)) within kHermTol.
class HermitianOperator {
 public:
  explicit HermitianOperator(Eigen::MatrixXcd entries, double tol = kHermTol);

  static HermitianOperator identity(std::size_t dim);
  static HermitianOperator outer(const StateVector& s);  // |s><s|

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXcd entries_;
};

/// Measurement effects plus the projector onto the subspace they resolve.
class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> effects);
  Povm(std::vector<HermitianOperator> effects, Eigen::MatrixXcd support);

  const std::vector<HermitianOperator>& effects() const { return effects_; }
  const Eigen::MatrixXcd& support() const { return support_; }
  std::size_t dim() const { return static_cast<std::size_t>(support_.rows()); }

  double completeness_deviation() const;  // max |sum(effects) - support|
  double min_effect_eigenvalue() const;
  void validate(double psd_tol = 1e-10, double sum_tol = 1e-10) const;

 private:
  std::vector<HermitianOperator> effects_;
  Eigen::MatrixXcd support_;
};

// <a|b>, conjugate-linear in the first argument.
cxd inner(const StateVector& a, const StateVector& b);

// Matrix-vector products. The result is not re-normalized: unitary inputs
// preserve the norm, Hermitian ones generally do not.
StateVector apply(const HermitianOperator& op, const StateVector& s);
StateVector apply(const Eigen::MatrixXcd& op, const StateVector& s);

// a (x) b, with b's register least significant: result[i*b.dim + j] = a_i * b_j.
StateVector tensor(const StateVector& a, const StateVector& b);

struct SpectralInvSqrt {
  HermitianOperator inv_sqrt;   // eigenvalues mapped to 1/sqrt(lambda) on the support
  Eigen::MatrixXcd support;     // projector onto the retained eigenspace
  std::size_t rank = 0;
};

// Pseudo-inverse square root: eigenvalues above rel_cutoff * lambda_max are
// mapped to lambda^{-1/2}, the rest to 0. Throws if op has an eigenvalue
// below -1e-8 * lambda_max (not positive semidefinite).
SpectralInvSqrt inv_sqrt_on_support_spectral(const HermitianOperator& op,
                                             double rel_cutoff = 1e-12);
HermitianOperator inv_sqrt_on_support(const HermitianOperator& op,
                                      double rel_cutoff = 1e-12);

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
double uniform_double(std::mt19937_64& rng);

// Uniform index in [0,n), rejection sampled.
std::size_t random_index(std::mt19937_64& rng, std::size_t n);

// Samples a basis index with probability |amps_i|^2. Deterministic given
// the state and the rng stream position.
std::size_t sample(const StateVector& s, std::mt19937_64& rng);

}  // namespace qsearch
