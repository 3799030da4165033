#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dfm {

/// Cardinalities M = |G| and N = |H| of the two cyclic factors.
struct ModelParams {
  unsigned M = 1;
  unsigned N = 1;

  /// Throws ParameterError unless M, N >= 1.
  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

/// Multi-indices (i, a, b): i in Z_M^r, a in Z_M^p, b in Z_N^p.
struct IndexConfig {
  std::vector<unsigned> i;
  std::vector<unsigned> a;
  std::vector<unsigned> b;
};

/// Residue tuple view used by the counting kernels.
using Residues = std::span<const unsigned>;

/// Reusable buffers for multiset comparisons of pair-encoded values.
struct MultisetScratch {
  std::vector<std::uint32_t> lhs;
  std::vector<std::uint32_t> rhs;
};

/// Multiset equality
///   [(u + a_y, b_y), (v + a_y, b_{y+1})] == [(u + a_y, b_{y+1}), (v + a_y, b_y)]
/// over y = 0..p-1 (indices mod p, sums mod M), with pairs encoded as a*N + b.
bool pair_condition(Residues a, Residues b, ModelParams params, unsigned u, unsigned v,
                    MultisetScratch& scratch);

/// [(a_y, b_y)] == [(a_y, b_{y+1})], the base condition defining the limiting moments.
bool base_condition(Residues a, Residues b, ModelParams params, MultisetScratch& scratch);

/// Throws ParameterError unless every entry of `values` is < modulus.
void check_residues(Residues values, unsigned modulus, const char* name);

}  // namespace dfm
