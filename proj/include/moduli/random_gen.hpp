#ifndef MODULI_RANDOM_GEN_HPP
#define MODULI_RANDOM_GEN_HPP

#include <cstdint>
#include <random>

#include "moduli/algebroid.hpp"
#include "moduli/lform.hpp"

namespace moduli {

/// Deterministic sub-seed for trial `index` of a seeded run (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Seeded generator for random exact inputs used by identity suites and
/// property tests.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t uint(std::uint64_t bound);  // uniform in [0, bound)
  Rational rational();                      // small numerator/denominator
  Polynomial poly(std::size_t num_vars, std::size_t max_degree, std::size_t terms = 3);
  SectionExpr section(const AlgebroidSpec& spec, std::size_t max_degree);
  /// Random form with the given value shape; a sparse subset of tuples is
  /// filled to keep identity checks fast.
  LForm form(std::size_t degree, std::size_t rank, std::size_t num_vars, std::size_t rows,
             std::size_t cols, std::size_t max_degree);
  ConnectionForm connection(std::size_t rank, std::size_t num_vars, std::size_t dim,
                            std::size_t max_degree);
  /// Unimodular polynomial gauge map (product of random shears), with its
  /// exact inverse.
  GaugeMap gauge(std::size_t dim, std::size_t num_vars, std::size_t max_degree);
  /// Constant invertible matrix with small integer entries, exact inverse.
  GaugeMap constant_gauge(std::size_t dim, std::size_t num_vars);

private:
  std::mt19937_64 rng_;
};

}  // namespace moduli

#endif
