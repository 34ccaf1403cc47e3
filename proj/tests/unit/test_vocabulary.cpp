#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "farsivec/error.hpp"
#include "farsivec/vocabulary.hpp"
#include "fuzz_corpus.hpp"

using namespace farsivec;

namespace {

using Entries = std::vector<Vocabulary::Entry>;

TokenStream stream_of(std::vector<std::vector<std::string>> sentences) { return TokenStream{std::move(sentences)}; }

}  // namespace

TEST_CASE("build_vocabulary orders by count after the sentinels") {
  const auto v = build_vocabulary(stream_of({{"ا", "ب", "ا"}}), 1);
  CHECK(v.entries() == Entries{{"UNK", 0}, {"UNK_PAD", 0}, {"ا", 2}, {"ب", 1}});
  CHECK(build_vocabulary(TokenStream{}, 1).entries() == Entries{{"UNK", 0}, {"UNK_PAD", 0}});
  CHECK(build_vocabulary(stream_of({{"ا", "ب"}}), 2).entries() == Entries{{"UNK", 2}, {"UNK_PAD", 0}});
}

TEST_CASE("ties keep first-appearance order") {
  const auto v = build_vocabulary(stream_of({{"c", "b"}, {"a", "b", "a", "c"}}), 1);
  CHECK(v.entries() == Entries{{"UNK", 0}, {"UNK_PAD", 0}, {"c", 2}, {"b", 2}, {"a", 2}});
}

TEST_CASE("lookups map unknown words to UNK") {
  const auto v = build_vocabulary(stream_of({{"کتاب", "خوب", "کتاب"}}), 1);
  CHECK(v.lookup_id("کتاب") == 2);
  CHECK(v.lookup_id("خوب") == 3);
  CHECK(v.lookup_id("ناشناس") == kUnkId);
  CHECK(v.lookup_id("UNK_PAD") == kPadId);
  CHECK(v.lookup_word(0) == "UNK");
  CHECK(v.lookup_word(1) == "UNK_PAD");
  CHECK_THROWS_AS(v.lookup_word(4), std::out_of_range);
  for (WordId id = 0; id < v.size(); ++id) CHECK(v.lookup_id(v.lookup_word(id)) == id);
}

TEST_CASE("encode_stream keeps sentence structure") {
  const auto v = build_vocabulary(stream_of({{"a", "b"}, {"b"}}), 1);
  CHECK(encode_stream(v, stream_of({{"UNK_PAD"}})) == EncodedCorpus{{1}});
  CHECK(encode_stream(v, stream_of({{"a", "b"}, {"b"}})) == EncodedCorpus{{3, 2}, {2}});
  CHECK(encode_stream(v, stream_of({{"zzz", "a"}, {}})) == EncodedCorpus{{0, 3}, {}});
}

TEST_CASE("counts are conserved and monotone on fuzzed streams") {
  for (std::uint64_t min_occ : {1, 2, 5}) {
    TokenStream stream;
    for (const auto& s : farsivec::testing::fuzz_corpus(300, min_occ)) stream.sentences.push_back(tokenize(s));
    const auto v = build_vocabulary(stream, min_occ);
    std::uint64_t total = 0;
    for (const auto& e : v.entries()) total += e.count;
    CHECK(total == stream.token_count());
    CHECK(v.count(kPadId) == 0);
    for (WordId id = 3; id < v.size(); ++id) CHECK(v.count(id - 1) >= v.count(id));
    for (WordId id = 2; id < v.size(); ++id) CHECK(v.count(id) >= min_occ);
    CHECK(build_vocabulary(stream, min_occ) == v);

    for (const auto& sentence : encode_stream(v, stream)) {
      for (const WordId id : sentence) CHECK(id != kPadId);
    }
  }
}

TEST_CASE("literal sentinel tokens are tallied on UNK") {
  const auto v = build_vocabulary(stream_of({{"UNK", "x", "UNK_PAD"}}), 1);
  CHECK(v.entries() == Entries{{"UNK", 2}, {"UNK_PAD", 0}, {"x", 1}});
}

TEST_CASE("vocabularies must start with the sentinels and hold unique words") {
  CHECK_THROWS_AS(Vocabulary(Entries{{"a", 1}}), ConfigError);
  CHECK_THROWS_AS(Vocabulary(Entries{{"UNK", 0}, {"UNK_PAD", 0}, {"a", 1}, {"a", 1}}), ConfigError);
  CHECK(Vocabulary().size() == 2);
}
