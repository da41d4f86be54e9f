#pragma once

// Set partitions of [n] = {1..n}: enumeration by class, the refinement
// order, non-crossing tests and the Möbius function of NC(n). Everything
// here is exact integer arithmetic.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string_view>
#include <vector>

namespace freespec {

enum class PartitionClass { All, Pairings, NonCrossing, NonCrossingPairings };

std::string_view to_string(PartitionClass cls) noexcept;
/// Accepts the CLI spellings all|pair|nc|ncpair as well as the enum names.
PartitionClass parse_partition_class(std::string_view text);

/// Largest n accepted by for_each_partition (streaming, bounded memory).
int streaming_cap(PartitionClass cls) noexcept;
/// Largest n accepted by enumerate(), which materializes the whole list.
int materialize_cap(PartitionClass cls) noexcept;

/// A partition of {1..n} held in canonical form: blocks ordered by their
/// minimum, elements ascending inside each block.
class Partition {
 public:
  using Block = std::vector<int>;

  /// Validates that `blocks` are disjoint, non-empty and cover {1..n},
  /// then canonicalizes. Throws Error(Input) otherwise.
  Partition(int n, std::vector<Block> blocks);

  static Partition finest(int n);    // 0_n, all singletons
  static Partition coarsest(int n);  // 1_n, one block

  int size() const noexcept { return n_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }

  /// labels()[i-1] is the index of the block that holds element i.
  std::vector<int> labels() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  /// Lexicographic on the canonical block lists; this is the enumeration
  /// order.
  friend std::strong_ordering operator<=>(const Partition& a,
                                          const Partition& b);

 private:
  struct Trusted {};
  Partition(Trusted, int n, std::vector<Block> blocks)
      : n_(n), blocks_(std::move(blocks)) {}
  friend class PartitionGenerator;

  int n_ = 0;
  std::vector<Block> blocks_;
};

/// Calls visit(p) for every partition of class `cls` in lexicographic
/// order without materializing the list. n must be in [1, streaming_cap].
void for_each_partition(int n, PartitionClass cls,
                        const std::function<void(const Partition&)>& visit);

/// Complete, duplicate-free, lexicographically ordered list.
/// Pairings classes return an empty list for odd n.
std::vector<Partition> enumerate(int n, PartitionClass cls);

/// Exact cardinality from closed forms (Bell, (n-1)!!, Catalan), valid up
/// to the streaming cap.
std::uint64_t count_partitions(int n, PartitionClass cls);

bool is_noncrossing(const Partition& p);
bool is_pairing(const Partition& p);

/// Refinement order: every block of p1 lies inside a block of p2.
bool leq(const Partition& p1, const Partition& p2);

/// C_k = binom(2k, k)/(k+1), exact; throws SizeLimit once it leaves int64
/// (k > 35).
std::int64_t catalan(int k);

/// Möbius function of the lattice NC(n) on the interval [p1, p2], by the
/// recursion mu(p1,p1) = 1, mu(p1,s) = -sum_{p1 <= t < s} mu(p1,t).
/// Throws Error(Order) unless p1 <= p2.
std::int64_t mobius_nc(const Partition& p1, const Partition& p2);

/// r_i = number of blocks of size i (only non-zero sizes are present).
std::map<int, int> block_type_counts(const Partition& p);

/// Partitions of one class grouped by block type. counts[i-1] = r_i.
struct BlockTypeClass {
  std::vector<int> counts;
  std::int64_t multiplicity = 0;
};

/// Cached census of P(n) or NC(n) by block type (thread-safe, built on
/// first use).
const std::vector<BlockTypeClass>& block_type_census(int n, PartitionClass cls);

/// Every pi in NC(n) paired with mu(pi, 1_n). Cached; n <= 10.
struct MobiusEntry {
  Partition partition;
  std::int64_t mu_to_top;
};
const std::vector<MobiusEntry>& mobius_to_top_table(int n);
inline constexpr int kMobiusTableCap = 10;

}  // namespace freespec
