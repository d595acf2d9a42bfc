#pragma once

#include <cstdint>
#include <vector>

#include "qstar/algebra.hpp"

namespace qstar {

inline constexpr std::uint64_t kDefaultSeed = 0xA11CE;
inline constexpr int kDefaultRandomProbes = 32;

/// Seeded elements with standard complex Gaussian coefficients, rescaled to
/// unit Frobenius norm.
std::vector<Element> random_elements(const QuasiAlgebra& alg, int count, std::uint64_t seed);

/// All basis elements (the unit among them), `random_count` seeded random
/// unit-Frobenius elements, then the adjoints of everything before.
std::vector<Element> standard_probes(const QuasiAlgebra& alg, int random_count = kDefaultRandomProbes,
                                     std::uint64_t seed = kDefaultSeed);

} // namespace qstar
