#include "farsivec/vocabulary.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "farsivec/error.hpp"

namespace farsivec {

Vocabulary::Vocabulary() : Vocabulary(std::vector<Entry>{{std::string(kUnkWord), 0}, {std::string(kPadWord), 0}}) {}

Vocabulary::Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2 || entries_[kUnkId].word != kUnkWord || entries_[kPadId].word != kPadWord) {
    throw ConfigError("vocabulary must start with the UNK and UNK_PAD sentinels");
  }
  index_.reserve(entries_.size());
  for (std::size_t id = 0; id < entries_.size(); ++id) {
    const auto [it, inserted] = index_.emplace(entries_[id].word, static_cast<WordId>(id));
    if (!inserted) throw ConfigError("duplicate vocabulary word: " + entries_[id].word);
  }
}

WordId Vocabulary::lookup_id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::lookup_word(WordId id) const {
  if (id >= entries_.size()) {
    throw std::out_of_range("word id " + std::to_string(id) + " outside vocabulary of size " +
                            std::to_string(entries_.size()));
  }
  return entries_[id].word;
}

bool Vocabulary::contains(std::string_view word) const { return index_.find(std::string(word)) != index_.end(); }

Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_occurrences) {
  struct Tally {
    std::uint64_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string_view, Tally> tallies;
  std::vector<std::string_view> order;
  std::uint64_t unknown = 0;
  for (const auto& sentence : stream.sentences) {
    for (const auto& token : sentence) {
      if (token == kUnkWord || token == kPadWord) {
        ++unknown;
        continue;
      }
      auto [it, inserted] = tallies.try_emplace(token, Tally{0, order.size()});
      if (inserted) order.push_back(token);
      ++it->second.count;
    }
  }

  std::vector<std::string_view> kept;
  for (const auto word : order) {
    const auto& t = tallies.at(word);
    if (t.count >= min_occurrences) {
      kept.push_back(word);
    } else {
      unknown += t.count;
    }
  }
  // `order` is first-appearance order, so a stable sort keeps that as the tie-break.
  std::stable_sort(kept.begin(), kept.end(),
                   [&](std::string_view a, std::string_view b) { return tallies.at(a).count > tallies.at(b).count; });

  std::vector<Vocabulary::Entry> entries;
  entries.reserve(kept.size() + 2);
  entries.push_back({std::string(kUnkWord), unknown});
  entries.push_back({std::string(kPadWord), 0});
  for (const auto word : kept) entries.push_back({std::string(word), tallies.at(word).count});
  return Vocabulary(std::move(entries));
}

EncodedCorpus encode_stream(const Vocabulary& vocab, const TokenStream& stream) {
  EncodedCorpus out;
  out.reserve(stream.sentences.size());
  for (const auto& sentence : stream.sentences) {
    std::vector<WordId> ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) ids.push_back(vocab.lookup_id(token));
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace farsivec
