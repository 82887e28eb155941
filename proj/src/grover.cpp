#include "qsearch/grover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace qsearch::grover {

namespace {

void oracle_in_place(const std::vector<std::size_t>& indices, std::vector<cxd>& amps) {
  for (std::size_t i : indices) amps[i] = -amps[i];
}

void diffusion_in_place(std::vector<cxd>& amps) {
  // compensated sums keep the norm within kNormTol over ~1e3 steps at N = 2^20
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  for (const auto& a : amps) {
    const double yr = a.real() - cr;
    const double tr = sr + yr;
    cr = (tr - sr) - yr;
    sr = tr;
    const double yi = a.imag() - ci;
    const double ti = si + yi;
    ci = (ti - si) - yi;
    si = ti;
  }
  const cxd twice_mean = 2.0 * cxd{sr, si} / static_cast<double>(amps.size());
  for (auto& a : amps) a = twice_mean - a;
}

StateVector as_state(std::vector<cxd> amps, const char* what) {
  StateVector s = StateVector::raw(std::move(amps));
  if (!s.is_normalized()) {
    throw std::invalid_argument(std::string(what) + ": result is not a unit state");
  }
  return s;
}

}  // namespace

GroverParams params(std::size_t n, std::size_t k) {
  if (n < 2) throw std::invalid_argument("grover::params: need N >= 2");
  if (k < 1 || k >= n) {
    throw std::invalid_argument("grover::params: need 1 <= K < N");
  }
  GroverParams p;
  p.dim = n;
  p.marked_count = k;
  p.omega = std::acos(1.0 - 2.0 * static_cast<double>(k) / static_cast<double>(n));
  p.m0 = std::numbers::pi / (2.0 * p.omega) - 0.5;
  return p;
}

std::size_t optimal_steps(const GroverParams& p) {
  // nearest integer, half-way cases toward the smaller
  const double steps = std::ceil(p.m0 - 0.5);
  return steps <= 0.0 ? 0 : static_cast<std::size_t>(steps);
}

MarkedSet::MarkedSet(std::size_t dim, std::vector<std::size_t> indices)
    : dim_(dim), indices_(std::move(indices)) {
  if (dim_ == 0) throw std::invalid_argument("MarkedSet: dimension must be positive");
  std::sort(indices_.begin(), indices_.end());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= dim_) {
      throw std::out_of_range("MarkedSet: index out of range");
    }
    if (i > 0 && indices_[i] == indices_[i - 1]) {
      throw std::invalid_argument("MarkedSet: duplicate index");
    }
  }
}

bool MarkedSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

StateVector oracle_apply(const MarkedSet& marked, const StateVector& s) {
  if (marked.dim() != s.dim()) {
    throw std::invalid_argument("oracle_apply: dimension mismatch");
  }
  std::vector<cxd> amps = s.amps();
  oracle_in_place(marked.indices(), amps);
  return as_state(std::move(amps), "oracle_apply");
}

StateVector standard_oracle_apply(const MarkedSet& marked, const StateVector& joint) {
  if (joint.dim() != 2 * marked.dim()) {
    throw std::invalid_argument(
        "standard_oracle_apply: joint state must live on register (x) ancilla qubit");
  }
  std::vector<cxd> amps = joint.amps();
  for (std::size_t y : marked.indices()) {
    std::swap(amps[2 * y], amps[2 * y + 1]);
  }
  return as_state(std::move(amps), "standard_oracle_apply");
}

StateVector diffusion_apply(const StateVector& s) {
  std::vector<cxd> amps = s.amps();
  diffusion_in_place(amps);
  return as_state(std::move(amps), "diffusion_apply");
}

StateVector grover_state(const GroverParams& p, const MarkedSet& marked, double steps) {
  if (marked.dim() != p.dim || marked.count() != p.marked_count) {
    throw std::invalid_argument("grover_state: marked set inconsistent with params");
  }
  if (steps < 0.0) throw std::invalid_argument("grover_state: steps must be >= 0");
  const double theta = (2.0 * steps + 1.0) * p.omega / 2.0;
  const double marked_amp =
      std::sin(theta) / std::sqrt(static_cast<double>(p.marked_count));
  const double rest_amp =
      std::cos(theta) / std::sqrt(static_cast<double>(p.dim - p.marked_count));
  std::vector<cxd> amps(p.dim, cxd{rest_amp, 0.0});
  for (std::size_t i : marked.indices()) amps[i] = cxd{marked_amp, 0.0};
  return as_state(std::move(amps), "grover_state");
}

StateVector run(const GroverParams& p, const MarkedSet& marked, std::size_t steps) {
  if (marked.dim() != p.dim || marked.count() != p.marked_count) {
    throw std::invalid_argument("run: marked set inconsistent with params");
  }
  std::vector<cxd> amps(p.dim,
                        cxd{1.0 / std::sqrt(static_cast<double>(p.dim)), 0.0});
  for (std::size_t i = 0; i < steps; ++i) {
    oracle_in_place(marked.indices(), amps);
    diffusion_in_place(amps);
  }
  return as_state(std::move(amps), "run");
}

double success_prob(const GroverParams& p, double steps) {
  if (steps < 0.0) throw std::invalid_argument("success_prob: steps must be >= 0");
  const double s = std::sin((2.0 * steps + 1.0) * p.omega / 2.0);
  return s * s;
}

}  // namespace qsearch::grover
