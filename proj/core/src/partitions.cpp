#include "freespec/partitions.hpp"

#include "freespec/error.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>

namespace freespec {

std::string_view to_string(PartitionClass cls) noexcept {
  switch (cls) {
    case PartitionClass::All: return "all";
    case PartitionClass::Pairings: return "pair";
    case PartitionClass::NonCrossing: return "nc";
    case PartitionClass::NonCrossingPairings: return "ncpair";
  }
  return "all";
}

PartitionClass parse_partition_class(std::string_view text) {
  if (text == "all" || text == "All") return PartitionClass::All;
  if (text == "pair" || text == "Pairings") return PartitionClass::Pairings;
  if (text == "nc" || text == "NonCrossing") return PartitionClass::NonCrossing;
  if (text == "ncpair" || text == "NonCrossingPairings")
    return PartitionClass::NonCrossingPairings;
  throw Error(ErrorCode::Input,
              "unknown partition class '" + std::string(text) + "'");
}

int streaming_cap(PartitionClass cls) noexcept {
  switch (cls) {
    case PartitionClass::All:
    case PartitionClass::Pairings: return 16;
    case PartitionClass::NonCrossing:
    case PartitionClass::NonCrossingPairings: return 20;
  }
  return 16;
}

int materialize_cap(PartitionClass cls) noexcept {
  switch (cls) {
    case PartitionClass::All: return 12;
    case PartitionClass::Pairings: return 16;
    case PartitionClass::NonCrossing: return 14;
    case PartitionClass::NonCrossingPairings: return 20;
  }
  return 12;
}

namespace {

void check_range(int n, int cap, PartitionClass cls) {
  if (n < 1 || n > cap) {
    throw Error(ErrorCode::SizeLimit,
                "n=" + std::to_string(n) + " outside [1, " +
                    std::to_string(cap) + "] for class " +
                    std::string(to_string(cls)));
  }
}

bool is_pairing_class(PartitionClass cls) {
  return cls == PartitionClass::Pairings ||
         cls == PartitionClass::NonCrossingPairings;
}

bool is_nc_class(PartitionClass cls) {
  return cls == PartitionClass::NonCrossing ||
         cls == PartitionClass::NonCrossingPairings;
}

}  // namespace

Partition::Partition(int n, std::vector<Block> blocks) : n_(n) {
  if (n < 1) throw Error(ErrorCode::Input, "partition ground set must be non-empty");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (auto& b : blocks) {
    if (b.empty()) throw Error(ErrorCode::Input, "partition has an empty block");
    std::sort(b.begin(), b.end());
    for (int e : b) {
      if (e < 1 || e > n)
        throw Error(ErrorCode::Input, "element " + std::to_string(e) +
                                          " outside {1.." + std::to_string(n) + "}");
      if (seen[e]) throw Error(ErrorCode::Input, "element " + std::to_string(e) +
                                                     " appears in two blocks");
      seen[e] = 1;
    }
  }
  for (int e = 1; e <= n; ++e) {
    if (!seen[e])
      throw Error(ErrorCode::Input, "element " + std::to_string(e) + " not covered");
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.front() < b.front(); });
  blocks_ = std::move(blocks);
}

Partition Partition::finest(int n) {
  std::vector<Block> blocks;
  for (int i = 1; i <= n; ++i) blocks.push_back({i});
  return Partition(n, std::move(blocks));
}

Partition Partition::coarsest(int n) {
  Block b(static_cast<std::size_t>(n));
  std::iota(b.begin(), b.end(), 1);
  return Partition(n, {std::move(b)});
}

std::vector<int> Partition::labels() const {
  std::vector<int> lab(static_cast<std::size_t>(n_));
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (int e : blocks_[b]) lab[e - 1] = static_cast<int>(b);
  return lab;
}

std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  return a.blocks_ <=> b.blocks_;
}

// Builds partitions block by block. The block holding the smallest free
// element is opened, then either closed or extended by a larger free
// element; "close before extend" and increasing extensions give the
// lexicographic order of canonical block lists.
//
// Non-crossing rule: since every earlier block has an element smaller than
// the current block's minimum, extending the current block from `last` to
// `e` crosses an earlier block iff some element strictly between them is
// already taken.
class PartitionGenerator {
 public:
  PartitionGenerator(int n, PartitionClass cls,
                     const std::function<void(const Partition&)>& visit)
      : n_(n),
        pairing_(is_pairing_class(cls)),
        nc_(is_nc_class(cls)),
        owner_(static_cast<std::size_t>(n) + 1, 0),
        visit_(visit) {}

  void run() {
    if (pairing_ && n_ % 2 != 0) return;
    open_block();
  }

 private:
  void open_block() {
    int m = 1;
    while (m <= n_ && owner_[m]) ++m;
    if (m > n_) {
      visit_(Partition(Partition::Trusted{}, n_, blocks_));
      return;
    }
    blocks_.push_back({m});
    owner_[m] = 1;
    extend(m);
    owner_[m] = 0;
    blocks_.pop_back();
  }

  void extend(int last) {
    const auto size = blocks_.back().size();
    if (!pairing_ || size == 2) open_block();
    if (pairing_ && size == 2) return;
    for (int e = last + 1; e <= n_; ++e) {
      if (owner_[e]) {
        if (nc_) break;
        continue;
      }
      // In NC pairing mode the gap (last, e) must be paired internally.
      if (nc_ && pairing_ && (e - last - 1) % 2 != 0) continue;
      owner_[e] = 1;
      blocks_.back().push_back(e);
      extend(e);
      blocks_.back().pop_back();
      owner_[e] = 0;
    }
  }

  int n_;
  bool pairing_;
  bool nc_;
  std::vector<char> owner_;
  std::vector<Partition::Block> blocks_;
  const std::function<void(const Partition&)>& visit_;
};

void for_each_partition(int n, PartitionClass cls,
                        const std::function<void(const Partition&)>& visit) {
  check_range(n, streaming_cap(cls), cls);
  PartitionGenerator(n, cls, visit).run();
}

std::vector<Partition> enumerate(int n, PartitionClass cls) {
  check_range(n, materialize_cap(cls), cls);
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(count_partitions(n, cls)));
  PartitionGenerator(n, cls, [&](const Partition& p) { out.push_back(p); }).run();
  return out;
}

namespace {

std::uint64_t bell_number(int n) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

std::uint64_t odd_double_factorial(int n) {  // (n-1)!! for even n
  std::uint64_t r = 1;
  for (int k = n - 1; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

}  // namespace

std::uint64_t count_partitions(int n, PartitionClass cls) {
  check_range(n, streaming_cap(cls), cls);
  switch (cls) {
    case PartitionClass::All: return bell_number(n);
    case PartitionClass::Pairings: return n % 2 ? 0 : odd_double_factorial(n);
    case PartitionClass::NonCrossing: return static_cast<std::uint64_t>(catalan(n));
    case PartitionClass::NonCrossingPairings:
      return n % 2 ? 0 : static_cast<std::uint64_t>(catalan(n / 2));
  }
  return 0;
}

bool is_noncrossing(const Partition& p) {
  // Scan 1..n keeping a stack of blocks that are open (minimum seen,
  // maximum not yet). A revisited block must be on top, otherwise a block
  // opened in between is still open and the two cross.
  const auto lab = p.labels();
  const auto& blocks = p.blocks();
  std::vector<int> stack;
  for (int e = 1; e <= p.size(); ++e) {
    const int b = lab[e - 1];
    const auto& blk = blocks[b];
    if (e == blk.front()) {
      stack.push_back(b);
    } else if (stack.empty() || stack.back() != b) {
      return false;
    }
    if (e == blk.back()) stack.pop_back();
  }
  return true;
}

bool is_pairing(const Partition& p) {
  return std::all_of(p.blocks().begin(), p.blocks().end(),
                     [](const auto& b) { return b.size() == 2; });
}

bool leq(const Partition& p1, const Partition& p2) {
  if (p1.size() != p2.size())
    throw Error(ErrorCode::Dimension, "leq: partitions of different ground sets (" +
                                          std::to_string(p1.size()) + " vs " +
                                          std::to_string(p2.size()) + ")");
  const auto lab2 = p2.labels();
  for (const auto& b : p1.blocks()) {
    const int target = lab2[b.front() - 1];
    for (int e : b)
      if (lab2[e - 1] != target) return false;
  }
  return true;
}

std::int64_t catalan(int k) {
  if (k < 0) throw Error(ErrorCode::Input, "catalan: negative index");
  // C_{i+1} = C_i * 2(2i+1) / (i+2). Dividing C_i by g = gcd(C_i, i+2)
  // first keeps every step exact; (i+2)/g then divides 2(2i+1).
  std::int64_t c = 1;
  for (int i = 0; i < k; ++i) {
    const std::int64_t g = std::gcd(c, static_cast<std::int64_t>(i + 2));
    const std::int64_t f = 2 * (2 * i + 1) / ((i + 2) / g);
    if (__builtin_mul_overflow(c / g, f, &c))
      throw Error(ErrorCode::SizeLimit,
                  "catalan(" + std::to_string(k) + ") overflows int64");
  }
  return c;
}

namespace {

// pi <= sigma using precomputed data: rep[i] is the smallest element of
// i's block in pi, lab is sigma's label array (both 0-based).
bool leq_fast(const std::vector<int>& rep, const std::vector<int>& lab) {
  for (std::size_t i = 0; i < rep.size(); ++i)
    if (lab[i] != lab[static_cast<std::size_t>(rep[i])]) return false;
  return true;
}

std::vector<int> block_representatives(const Partition& p) {
  std::vector<int> rep(static_cast<std::size_t>(p.size()));
  for (const auto& b : p.blocks())
    for (int e : b) rep[e - 1] = b.front() - 1;
  return rep;
}

}  // namespace

std::int64_t mobius_nc(const Partition& p1, const Partition& p2) {
  if (p1.size() != p2.size())
    throw Error(ErrorCode::Dimension, "mobius_nc: partitions of different ground sets");
  if (!is_noncrossing(p1) || !is_noncrossing(p2))
    throw Error(ErrorCode::PartitionClass, "mobius_nc: arguments must be non-crossing");
  if (!leq(p1, p2)) throw Error(ErrorCode::Order, "mobius_nc: p1 is not below p2");
  if (p1 == p2) return 1;

  // Collect the interval [p1, p2] of NC(n), finest first.
  std::vector<Partition> interval;
  const auto rep1 = block_representatives(p1);
  const auto lab2 = p2.labels();
  for_each_partition(p1.size(), PartitionClass::NonCrossing, [&](const Partition& s) {
    if (leq_fast(rep1, s.labels()) && leq_fast(block_representatives(s), lab2))
      interval.push_back(s);
  });
  std::stable_sort(interval.begin(), interval.end(),
                   [](const Partition& a, const Partition& b) {
                     return a.block_count() > b.block_count();
                   });

  std::vector<std::vector<int>> reps, labs;
  for (const auto& s : interval) {
    reps.push_back(block_representatives(s));
    labs.push_back(s.labels());
  }
  std::vector<std::int64_t> mu(interval.size(), 0);
  for (std::size_t s = 0; s < interval.size(); ++s) {
    if (interval[s] == p1) {
      mu[s] = 1;
      continue;
    }
    std::int64_t acc = 0;
    for (std::size_t t = 0; t < s; ++t)
      if (interval[t].block_count() > interval[s].block_count() &&
          leq_fast(reps[t], labs[s]))
        acc += mu[t];
    mu[s] = -acc;
    if (interval[s] == p2) return mu[s];
  }
  return mu.back();
}

std::map<int, int> block_type_counts(const Partition& p) {
  std::map<int, int> r;
  for (const auto& b : p.blocks()) ++r[static_cast<int>(b.size())];
  return r;
}

namespace {

template <typename T>
class CachedTable {
 public:
  template <typename Build>
  const T& get(int key, Build&& build) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find(key);
    if (it == table_.end())
      it = table_.emplace(key, std::make_unique<T>(build())).first;
    return *it->second;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<int, std::unique_ptr<T>> table_;
};

}  // namespace

const std::vector<BlockTypeClass>& block_type_census(int n, PartitionClass cls) {
  static CachedTable<std::vector<BlockTypeClass>> cache[4];
  check_range(n, materialize_cap(cls), cls);
  return cache[static_cast<int>(cls)].get(n, [&] {
    std::map<std::vector<int>, std::int64_t> tally;
    std::vector<int> counts(static_cast<std::size_t>(n));
    for_each_partition(n, cls, [&](const Partition& p) {
      std::fill(counts.begin(), counts.end(), 0);
      for (const auto& b : p.blocks()) ++counts[b.size() - 1];
      ++tally[counts];
    });
    std::vector<BlockTypeClass> out;
    for (auto& [c, m] : tally) out.push_back({c, m});
    return out;
  });
}

const std::vector<MobiusEntry>& mobius_to_top_table(int n) {
  static CachedTable<std::vector<MobiusEntry>> cache;
  if (n < 1 || n > kMobiusTableCap)
    throw Error(ErrorCode::SizeLimit, "Möbius table supports 1 <= n <= " +
                                          std::to_string(kMobiusTableCap));
  return cache.get(n, [&] {
    auto parts = enumerate(n, PartitionClass::NonCrossing);
    // Coarsest first so that every sigma > pi is processed before pi.
    std::vector<std::size_t> order(parts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return parts[a].block_count() < parts[b].block_count();
    });
    std::vector<std::vector<int>> reps(parts.size()), labs(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      reps[i] = block_representatives(parts[i]);
      labs[i] = parts[i].labels();
    }
    std::vector<std::int64_t> mu(parts.size(), 0);
    for (std::size_t a = 0; a < order.size(); ++a) {
      const std::size_t pi = order[a];
      if (parts[pi].block_count() == 1) {
        mu[pi] = 1;
        continue;
      }
      std::int64_t acc = 0;
      for (std::size_t b = 0; b < a; ++b) {
        const std::size_t s = order[b];
        if (parts[s].block_count() < parts[pi].block_count() &&
            leq_fast(reps[pi], labs[s]))
          acc += mu[s];
      }
      mu[pi] = -acc;
    }
    std::vector<MobiusEntry> out;
    out.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
      out.push_back({std::move(parts[i]), mu[i]});
    return out;
  });
}

}  // namespace freespec
