#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "farsivec/normalize.hpp"

namespace farsivec {

using WordId = std::uint32_t;
using EncodedCorpus = std::vector<std::vector<WordId>>;

inline constexpr WordId kUnkId = 0;
inline constexpr WordId kPadId = 1;
inline constexpr std::string_view kUnkWord = "UNK";
inline constexpr std::string_view kPadWord = "UNK_PAD";

/// Dense word <-> id map. Id 0 is UNK, id 1 is UNK_PAD, and the remaining
/// ids are ordered by non-increasing count. Immutable once built.
class Vocabulary {
 public:
  struct Entry {
    std::string word;
    std::uint64_t count = 0;

    bool operator==(const Entry&) const = default;
  };

  /// A vocabulary holding only the two sentinels.
  Vocabulary();

  /// Entries in id order; the first two must be the sentinels and words must be unique.
  /// Throws ConfigError otherwise.
  explicit Vocabulary(std::vector<Entry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Id of `word`, or kUnkId when absent.
  WordId lookup_id(std::string_view word) const;
  /// Throws std::out_of_range for ids outside [0, size()).
  const std::string& lookup_word(WordId id) const;
  std::uint64_t count(WordId id) const { return entries_.at(id).count; }
  bool contains(std::string_view word) const;

  bool operator==(const Vocabulary& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, WordId> index_;
};

/// Words seen at least `min_occurrences` times get ids from 2 upward by
/// descending count, ties broken by first appearance. Tokens below the
/// threshold (and literal sentinel tokens) are tallied on UNK.
Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_occurrences = 1);

EncodedCorpus encode_stream(const Vocabulary& vocab, const TokenStream& stream);

}  // namespace farsivec
