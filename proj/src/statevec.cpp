#include "qsearch/statevec.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace qsearch {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

StateVector::StateVector(std::vector<cxd> amps) : amps_(std::move(amps)) {
  if (amps_.empty()) {
    throw std::invalid_argument("StateVector: dimension must be positive");
  }
  if (!is_normalized()) {
    throw std::invalid_argument("StateVector: norm deviates from 1 by more than " +
                                std::to_string(kNormTol));
  }
}

StateVector StateVector::raw(std::vector<cxd> amps) {
  if (amps.empty()) {
    throw std::invalid_argument("StateVector: dimension must be positive");
  }
  StateVector s;
  s.amps_ = std::move(amps);
  return s;
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (dim == 0) throw std::invalid_argument("StateVector: dimension must be positive");
  if (index >= dim) throw std::out_of_range("StateVector: basis index out of range");
  std::vector<cxd> amps(dim, cxd{0.0, 0.0});
  amps[index] = cxd{1.0, 0.0};
  return raw(std::move(amps));
}

StateVector StateVector::uniform(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("StateVector: dimension must be positive");
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  return raw(std::vector<cxd>(dim, cxd{a, 0.0}));
}

double StateVector::norm() const {
  // compensated summation: the naive sum drifts past kNormTol around 2^20 entries
  double n2 = 0.0, c = 0.0;
  for (const auto& a : amps_) {
    const double y = std::norm(a) - c;
    const double t = n2 + y;
    c = (t - n2) - y;
    n2 = t;
  }
  return std::sqrt(n2);
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(norm() - 1.0) <= tol;
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n <= 0.0) throw std::invalid_argument("StateVector: cannot normalize zero vector");
  std::vector<cxd> amps = amps_;
  for (auto& a : amps) a /= n;
  return raw(std::move(amps));
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd entries, double tol)
    : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("HermitianOperator: matrix must be square and nonempty");
  }
  const double dev = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw std::invalid_argument("HermitianOperator: not Hermitian (deviation " +
                                std::to_string(dev) + ")");
  }
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return HermitianOperator(Eigen::MatrixXcd::Identity(n, n));
}

HermitianOperator HermitianOperator::outer(const StateVector& s) {
  const auto v = s.as_eigen();
  return HermitianOperator(v * v.adjoint());
}

Povm::Povm(std::vector<HermitianOperator> effects)
    : Povm(std::move(effects), Eigen::MatrixXcd{}) {}

Povm::Povm(std::vector<HermitianOperator> effects, Eigen::MatrixXcd support)
    : effects_(std::move(effects)), support_(std::move(support)) {
  if (effects_.empty()) {
    throw std::invalid_argument("Povm: needs at least one effect");
  }
  const std::size_t d = effects_.front().dim();
  for (const auto& e : effects_) {
    require_same_dim(e.dim(), d, "Povm");
  }
  if (support_.rows() == 0) {
    support_ = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d),
                                          static_cast<Eigen::Index>(d));
  } else if (static_cast<std::size_t>(support_.rows()) != d ||
             support_.rows() != support_.cols()) {
    throw std::invalid_argument("Povm: support projector dimension mismatch");
  }
}

double Povm::completeness_deviation() const {
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(support_.rows(), support_.cols());
  for (const auto& e : effects_) sum += e.matrix();
  return (sum - support_).cwiseAbs().maxCoeff();
}

double Povm::min_effect_eigenvalue() const {
  double lo = 0.0;
  bool first = true;
  for (const auto& e : effects_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e.matrix(),
                                                       Eigen::EigenvaluesOnly);
    const double m = es.eigenvalues().minCoeff();
    if (first || m < lo) lo = m;
    first = false;
  }
  return lo;
}

void Povm::validate(double psd_tol, double sum_tol) const {
  const double lo = min_effect_eigenvalue();
  if (lo < -psd_tol) {
    throw std::runtime_error("Povm: effect with eigenvalue " + std::to_string(lo));
  }
  const double dev = completeness_deviation();
  if (dev > sum_tol) {
    throw std::runtime_error("Povm: effects deviate from support by " +
                             std::to_string(dev));
  }
}

cxd inner(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  cxd acc{0.0, 0.0};
  const auto& av = a.amps();
  const auto& bv = b.amps();
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::conj(av[i]) * bv[i];
  return acc;
}

StateVector apply(const HermitianOperator& op, const StateVector& s) {
  return apply(op.matrix(), s);
}

StateVector apply(const Eigen::MatrixXcd& op, const StateVector& s) {
  if (op.rows() != op.cols()) {
    throw std::invalid_argument("apply: operator must be square");
  }
  require_same_dim(static_cast<std::size_t>(op.rows()), s.dim(), "apply");
  Eigen::VectorXcd out = op * s.as_eigen();
  return StateVector::raw(std::vector<cxd>(out.data(), out.data() + out.size()));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<cxd> out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      out[i * b.dim() + j] = a[i] * b[j];
    }
  }
  return StateVector::raw(std::move(out));
}

SpectralInvSqrt inv_sqrt_on_support_spectral(const HermitianOperator& op,
                                             double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.matrix());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("inv_sqrt_on_support: eigendecomposition failed");
  }
  const Eigen::VectorXd& evals = es.eigenvalues();
  const double lambda_max = std::max(evals.maxCoeff(), 0.0);
  if (evals.minCoeff() < -1e-8 * lambda_max) {
    throw std::invalid_argument("inv_sqrt_on_support: operator is not PSD (eigenvalue " +
                                std::to_string(evals.minCoeff()) + ")");
  }

  const Eigen::Index n = evals.size();
  Eigen::VectorXd mapped = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd kept = Eigen::VectorXd::Zero(n);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (evals(i) > rel_cutoff * lambda_max) {
      mapped(i) = 1.0 / std::sqrt(evals(i));
      kept(i) = 1.0;
      ++rank;
    }
  }
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::MatrixXcd m = v * mapped.asDiagonal() * v.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();  // strip GEMM rounding asymmetry
  Eigen::MatrixXcd proj = v * kept.asDiagonal() * v.adjoint();
  proj = 0.5 * (proj + proj.adjoint()).eval();
  return SpectralInvSqrt{HermitianOperator(std::move(m)), std::move(proj), rank};
}

HermitianOperator inv_sqrt_on_support(const HermitianOperator& op, double rel_cutoff) {
  return inv_sqrt_on_support_spectral(op, rel_cutoff).inv_sqrt;
}

double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t random_index(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("random_index: n must be positive");
  const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = rng();
  while (r >= bound) r = rng();
  return static_cast<std::size_t>(r % n);
}

std::size_t sample(const StateVector& s, std::mt19937_64& rng) {
  const double u = uniform_double(rng);
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  bool seen = false;
  const auto& amps = s.amps();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p > 0.0) {
      last_nonzero = i;
      seen = true;
    }
    acc += p;
    if (u < acc) return i;
  }
  // u landed past the accumulated total (norm rounded below 1).
  if (!seen) throw std::invalid_argument("sample: zero state");
  return last_nonzero;
}

}  // namespace qsearch
