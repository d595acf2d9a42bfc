#include "qstar/probes.hpp"

#include <random>

namespace qstar {

std::vector<Element> random_elements(const QuasiAlgebra& alg, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Element> out;
  out.reserve(static_cast<size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Vector c(alg.dim());
    for (int i = 0; i < alg.dim(); ++i) c(i) = cplx(normal(rng), normal(rng));
    Element e = alg.element(c);
    const double norm = e.matrix.norm();
    if (norm == 0.0) continue;
    out.push_back((1.0 / norm) * e);
  }
  return out;
}

std::vector<Element> standard_probes(const QuasiAlgebra& alg, int random_count, std::uint64_t seed) {
  std::vector<Element> probes;
  for (int i = 0; i < alg.dim(); ++i) probes.push_back(alg.basis_element(i));
  for (auto& e : random_elements(alg, random_count, seed)) probes.push_back(std::move(e));
  const size_t base = probes.size();
  for (size_t i = 0; i < base; ++i) probes.push_back(alg.adjoint(probes[i]));
  return probes;
}

} // namespace qstar
