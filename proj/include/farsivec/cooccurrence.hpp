#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "farsivec/vocabulary.hpp"

namespace farsivec {

struct CooccurrenceEntry {
  WordId i = 0;
  WordId j = 0;
  double x = 0.0;

  bool operator==(const CooccurrenceEntry&) const = default;
};

enum class WindowWeighting {
  kHarmonic,  // a pair d positions apart adds 1/d
  kFlat,      // every pair inside the window adds 1
};

/// Sparse term-term co-occurrence counts. Only positive entries are stored.
class CooccurrenceMatrix {
 public:
  explicit CooccurrenceMatrix(std::size_t vocab_size = 0) : vocab_size_(vocab_size) {}

  /// Adds `x` (> 0) to entry (i, j). Throws CorruptStreamError for ids >= vocab_size().
  void add(WordId i, WordId j, double x);
  double get(WordId i, WordId j) const;

  /// Entry-wise addition; both matrices must share the vocabulary size.
  void merge(const CooccurrenceMatrix& other);

  /// Every stored entry once, ordered by (i, j).
  std::vector<CooccurrenceEntry> entries() const;
  double row_sum(WordId i) const;

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t nnz() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

 private:
  static std::uint64_t key(WordId i, WordId j) { return (std::uint64_t{i} << 32) | j; }

  std::size_t vocab_size_;
  std::unordered_map<std::uint64_t, double> cells_;
};

/// Symmetric window accumulation. For every position t and offset d in
/// [1, context_size] inside the same sentence, both (w_t, w_{t+d}) and
/// (w_{t+d}, w_t) gain the window weight. Windows never cross sentences.
CooccurrenceMatrix accumulate(const EncodedCorpus& corpus, std::size_t vocab_size, std::size_t context_size,
                              WindowWeighting weighting = WindowWeighting::kHarmonic);

/// Same result as accumulate(), computed on `shards` contiguous sentence ranges in
/// parallel and merged in shard order. Sums may differ in the last bits.
CooccurrenceMatrix accumulate_sharded(const EncodedCorpus& corpus, std::size_t vocab_size, std::size_t context_size,
                                      std::size_t shards, WindowWeighting weighting = WindowWeighting::kHarmonic);

/// (x(i,k) / sum_c x(i,c)) / (x(j,k) / sum_c x(j,c)). Throws UndefinedRatioError
/// when a row sum or x(j,k) is zero.
double probability_ratio(const CooccurrenceMatrix& m, WordId i, WordId j, WordId k);

/// Spill format: little-endian records of (u32 i, u32 j, f64 x) sorted by (i, j).
void write_spill(const CooccurrenceMatrix& m, std::ostream& out);
CooccurrenceMatrix read_spill(std::istream& in, std::size_t vocab_size);

}  // namespace farsivec
