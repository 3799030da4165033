#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dfm/exact.hpp"

namespace dfm {

/// Largest ground set {0,...,p-1} handled by the partition routines. Blocks are
/// stored as 32-bit masks; full enumeration is practical up to p ~ 14.
inline constexpr unsigned kMaxGroundSet = 20;

/// Subset of {0,...,p-1}, bit x set iff x is a member.
using BlockMask = std::uint32_t;

/// Partition of {0,...,p-1} into nonempty disjoint blocks, stored canonically:
/// blocks ordered by their minimum element.
class SetPartition {
public:
  /// Validates disjointness, nonemptiness and coverage; throws ParameterError.
  SetPartition(unsigned p, const std::vector<std::vector<unsigned>>& blocks);

  /// From a restricted growth string (labels[0] = 0, labels[i] <= 1 + max of the prefix).
  static SetPartition from_labels(std::span<const std::uint8_t> labels);
  static SetPartition one_block(unsigned p);
  static SetPartition singletons(unsigned p);

  unsigned ground_size() const noexcept { return p_; }
  std::size_t block_count() const noexcept { return masks_.size(); }
  std::span<const BlockMask> masks() const noexcept { return masks_; }

  std::vector<std::vector<unsigned>> blocks() const;
  /// Block index of each element; a restricted growth string.
  std::vector<std::uint8_t> labels() const;

  bool operator==(const SetPartition&) const = default;

private:
  SetPartition(std::vector<BlockMask> masks, unsigned p) : p_(p), masks_(std::move(masks)) {}

  unsigned p_ = 0;
  std::vector<BlockMask> masks_;
};

/// Streams the partitions of {0,...,p-1} with at most `max_blocks` blocks in
/// restricted-growth-string order. Single consumer.
class PartitionStream {
public:
  explicit PartitionStream(unsigned p, unsigned max_blocks);

  std::optional<SetPartition> next();

  /// Current restricted growth string; valid after next() returned a value.
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

private:
  bool advance();

  unsigned p_;
  unsigned max_blocks_;
  bool started_ = false;
  bool done_ = false;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint8_t> prefix_max_;
};

/// All partitions of {0,...,p-1}. Throws ParameterError for p = 0 or p > kMaxGroundSet.
PartitionStream enumerate_partitions(unsigned p);
PartitionStream enumerate_partitions(unsigned p, unsigned max_blocks);

/// Materialized list of the partitions with at most `max_blocks` blocks.
std::vector<SetPartition> collect_partitions(unsigned p, unsigned max_blocks);

/// No a < b < c < d with a, c in one block and b, d in another.
bool is_noncrossing(const SetPartition& pi);

/// Kreweras complement. Throws PreconditionError on a crossing partition.
SetPartition kreweras_complement(const SetPartition& pi);

/// {(x - 1) mod p : x in block}.
BlockMask shift_block(BlockMask block, unsigned p);

/// pi |> sigma: |b & g| == |shift(b) & g| for every block b of pi and g of sigma.
/// Throws ParameterError when the ground sets differ.
bool triangle_relation(const SetPartition& pi, const SetPartition& sigma);

struct PartitionStats {
  unsigned p = 0;
  std::vector<BigInt> stirling;  ///< stirling[s] = #partitions with s blocks, s = 0..p
  BigInt bell;
  std::vector<BigInt> narayana;  ///< narayana[k] = #non-crossing partitions with k blocks
};

PartitionStats partition_stats(unsigned p);

/// Row p of the Stirling numbers of the second kind, index 0..p.
std::vector<BigInt> stirling_row(unsigned p);

BigInt narayana(unsigned p, unsigned k);

}  // namespace dfm
