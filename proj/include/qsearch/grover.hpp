#pragma once

#include <cstddef>
#include <vector>

#include "qsearch/statevec.hpp"

namespace qsearch::grover {

/// Rotation geometry of a K-marked search over an N-dimensional register:
/// cos(omega) = 1 - 2K/N and (2*m0 + 1)*omega = pi.
struct GroverParams {
  std::size_t dim = 0;           // N
  std::size_t marked_count = 0;  // K
  double omega = 0.0;
  double m0 = 0.0;
};

GroverParams params(std::size_t n, std::size_t k);

// round(m0) to the nearest integer, ties toward the smaller.
std::size_t optimal_steps(const GroverParams& p);

/// Strictly increasing basis indices below `dim`. May be empty (the oracle
/// is then the identity); callers that need K >= 1 check the count.
class MarkedSet {
 public:
  MarkedSet(std::size_t dim, std::vector<std::size_t> indices);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return indices_.size(); }
  const std::vector<std::size_t>& indices() const { return indices_; }
  bool contains(std::size_t index) const;

 private:
  std::size_t dim_;
  std::vector<std::size_t> indices_;
};

// Phase oracle: negates the amplitude of every marked index. O(K).
StateVector oracle_apply(const MarkedSet& marked, const StateVector& s);

// Two-register oracle on H_N (x) H_2 (ancilla least significant): XORs the
// match flag into the ancilla, i.e. swaps the ancilla amplitude pair at
// every marked register index.
StateVector standard_oracle_apply(const MarkedSet& marked, const StateVector& joint);

// Inversion about average: a_i -> 2*mean(a) - a_i. O(N), no dense matrix.
StateVector diffusion_apply(const StateVector& s);

// Closed-form state after `steps` Grover iterations (fractional allowed):
// sin((2m+1)w/2)/sqrt(K) on marked indices, cos((2m+1)w/2)/sqrt(N-K) elsewhere.
StateVector grover_state(const GroverParams& p, const MarkedSet& marked, double steps);

// Gate iteration from the uniform state: `steps` rounds of diffusion . oracle.
StateVector run(const GroverParams& p, const MarkedSet& marked, std::size_t steps);

// sin^2((2m+1)*omega/2).
double success_prob(const GroverParams& p, double steps);

}  // namespace qsearch::grover
