#include "dfm/partition.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "dfm/error.hpp"

namespace dfm {
namespace {

void check_ground_size(unsigned p) {
  if (p == 0) throw ParameterError("partitions need a nonempty ground set (p >= 1)");
  if (p > kMaxGroundSet)
    throw ParameterError("ground set size " + std::to_string(p) + " exceeds the cap of " +
                         std::to_string(kMaxGroundSet));
}

BlockMask full_mask(unsigned p) { return p == 32 ? ~BlockMask{0} : ((BlockMask{1} << p) - 1); }

unsigned lowest(BlockMask m) { return static_cast<unsigned>(std::countr_zero(m)); }
unsigned highest(BlockMask m) { return 31U - static_cast<unsigned>(std::countl_zero(m)); }

}  // namespace

SetPartition::SetPartition(unsigned p, const std::vector<std::vector<unsigned>>& blocks) : p_(p) {
  check_ground_size(p);
  BlockMask seen = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw ParameterError("empty block in set partition");
    BlockMask m = 0;
    for (unsigned x : block) {
      if (x >= p) throw ParameterError("block element " + std::to_string(x) + " outside ground set");
      const BlockMask bit = BlockMask{1} << x;
      if ((seen | m) & bit) throw ParameterError("element " + std::to_string(x) + " appears twice");
      m |= bit;
    }
    seen |= m;
    masks_.push_back(m);
  }
  if (seen != full_mask(p)) throw ParameterError("blocks do not cover the ground set");
  std::sort(masks_.begin(), masks_.end(), [](BlockMask a, BlockMask b) { return lowest(a) < lowest(b); });
}

SetPartition SetPartition::from_labels(std::span<const std::uint8_t> labels) {
  const auto p = static_cast<unsigned>(labels.size());
  check_ground_size(p);
  std::vector<BlockMask> masks;
  for (unsigned x = 0; x < p; ++x) {
    const unsigned l = labels[x];
    if (l > masks.size()) throw ParameterError("labels are not a restricted growth string");
    if (l == masks.size()) masks.push_back(0);
    masks[l] |= BlockMask{1} << x;
  }
  return SetPartition(std::move(masks), p);
}

SetPartition SetPartition::one_block(unsigned p) {
  check_ground_size(p);
  return SetPartition(std::vector<BlockMask>{full_mask(p)}, p);
}

SetPartition SetPartition::singletons(unsigned p) {
  check_ground_size(p);
  std::vector<BlockMask> masks(p);
  for (unsigned x = 0; x < p; ++x) masks[x] = BlockMask{1} << x;
  return SetPartition(std::move(masks), p);
}

std::vector<std::vector<unsigned>> SetPartition::blocks() const {
  std::vector<std::vector<unsigned>> out;
  out.reserve(masks_.size());
  for (BlockMask m : masks_) {
    auto& block = out.emplace_back();
    for (; m != 0; m &= m - 1) block.push_back(lowest(m));
  }
  return out;
}

std::vector<std::uint8_t> SetPartition::labels() const {
  std::vector<std::uint8_t> out(p_);
  for (std::size_t b = 0; b < masks_.size(); ++b)
    for (BlockMask m = masks_[b]; m != 0; m &= m - 1) out[lowest(m)] = static_cast<std::uint8_t>(b);
  return out;
}

PartitionStream::PartitionStream(unsigned p, unsigned max_blocks)
    : p_(p), max_blocks_(std::max(1U, std::min(max_blocks, p))), labels_(p, 0), prefix_max_(p, 0) {
  check_ground_size(p);
}

bool PartitionStream::advance() {
  // Rightmost position whose label can grow; everything after it resets to 0.
  for (unsigned i = p_; i-- > 1;) {
    const unsigned limit = std::min<unsigned>(prefix_max_[i - 1] + 1U, max_blocks_ - 1U);
    if (labels_[i] < limit) {
      ++labels_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], labels_[i]);
      for (unsigned j = i + 1; j < p_; ++j) {
        labels_[j] = 0;
        prefix_max_[j] = prefix_max_[i];
      }
      return true;
    }
  }
  return false;
}

std::optional<SetPartition> PartitionStream::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
  } else if (!advance()) {
    done_ = true;
    return std::nullopt;
  }
  return SetPartition::from_labels(labels_);
}

PartitionStream enumerate_partitions(unsigned p) { return PartitionStream(p, p); }

PartitionStream enumerate_partitions(unsigned p, unsigned max_blocks) {
  if (max_blocks == 0) throw ParameterError("max_blocks must be positive");
  return PartitionStream(p, max_blocks);
}

std::vector<SetPartition> collect_partitions(unsigned p, unsigned max_blocks) {
  std::vector<SetPartition> out;
  auto stream = enumerate_partitions(p, max_blocks);
  while (auto pi = stream.next()) out.push_back(std::move(*pi));
  return out;
}

bool is_noncrossing(const SetPartition& pi) {
  const auto masks = pi.masks();
  const auto labels = pi.labels();
  // Between two consecutive elements x < y of a block, every other block that
  // appears must lie strictly inside (x, y).
  for (BlockMask m : masks) {
    unsigned prev = lowest(m);
    for (BlockMask rest = m & (m - 1); rest != 0; rest &= rest - 1) {
      const unsigned cur = lowest(rest);
      for (unsigned z = prev + 1; z < cur; ++z) {
        const BlockMask other = masks[labels[z]];
        if (lowest(other) < prev || highest(other) > cur) return false;
      }
      prev = cur;
    }
  }
  return true;
}

SetPartition kreweras_complement(const SetPartition& pi) {
  if (!is_noncrossing(pi)) throw PreconditionError("Kreweras complement needs a non-crossing partition");
  const unsigned p = pi.ground_size();
  // Blocks as increasing cycles c; complement = c^{-1} composed with x -> x+1.
  std::vector<unsigned> cycle_inverse(p);
  for (auto& block : pi.blocks())
    for (std::size_t k = 0; k < block.size(); ++k)
      cycle_inverse[block[(k + 1) % block.size()]] = block[k];

  std::vector<std::vector<unsigned>> blocks;
  std::vector<bool> visited(p, false);
  for (unsigned start = 0; start < p; ++start) {
    if (visited[start]) continue;
    auto& block = blocks.emplace_back();
    for (unsigned x = start; !visited[x]; x = cycle_inverse[(x + 1) % p]) {
      visited[x] = true;
      block.push_back(x);
    }
  }
  return SetPartition(p, blocks);
}

BlockMask shift_block(BlockMask block, unsigned p) {
  const BlockMask wrap = (block & 1U) ? (BlockMask{1} << (p - 1)) : 0;
  return (block >> 1) | wrap;
}

bool triangle_relation(const SetPartition& pi, const SetPartition& sigma) {
  if (pi.ground_size() != sigma.ground_size())
    throw ParameterError("triangle relation needs partitions of the same ground set");
  const unsigned p = pi.ground_size();
  for (BlockMask beta : pi.masks()) {
    const BlockMask shifted = shift_block(beta, p);
    for (BlockMask gamma : sigma.masks())
      if (std::popcount(beta & gamma) != std::popcount(shifted & gamma)) return false;
  }
  return true;
}

std::vector<BigInt> stirling_row(unsigned p) {
  check_ground_size(p);
  std::vector<BigInt> row{1};
  for (unsigned n = 1; n <= p; ++n) {
    std::vector<BigInt> next(n + 1, 0);
    for (unsigned s = 1; s <= n; ++s) {
      next[s] = row[s - 1];
      if (s < n) next[s] += s * row[s];
    }
    row = std::move(next);
  }
  return row;
}

BigInt narayana(unsigned p, unsigned k) {
  if (k == 0 || k > p) return 0;
  BigInt n = binomial(p, k) * binomial(p, k - 1);
  return n / p;
}

PartitionStats partition_stats(unsigned p) {
  PartitionStats stats;
  stats.p = p;
  stats.stirling = stirling_row(p);
  stats.bell = std::accumulate(stats.stirling.begin(), stats.stirling.end(), BigInt(0));
  stats.narayana.resize(p + 1);
  for (unsigned k = 0; k <= p; ++k) stats.narayana[k] = narayana(p, k);
  return stats;
}

}  // namespace dfm
