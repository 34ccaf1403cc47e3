#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "farsivec/error.hpp"
#include "farsivec/normalize.hpp"
#include "farsivec/utf8.hpp"
#include "fuzz_corpus.hpp"

using namespace farsivec;

namespace {

const std::string kZ = "\xE2\x80\x8C";

const AffixRuleSet& rules() {
  static const AffixRuleSet r = AffixRuleSet::persian_defaults();
  return r;
}

const MarkSet& marks() {
  static const MarkSet m = MarkSet::persian_defaults();
  return m;
}

std::map<char32_t, int> visible_chars(const std::string& s) {
  std::map<char32_t, int> out;
  for (char32_t c : utf8::decode(s)) {
    if (c != U' ' && c != utf8::kZwnj) ++out[c];
  }
  return out;
}

}  // namespace

TEST_CASE("fix_pseudo_space joins listed affixes with ZWNJ") {
  CHECK(fix_pseudo_space("کتاب ها", rules()) == "کتاب" + kZ + "ها");
  CHECK(fix_pseudo_space("می رود", rules()) == "می" + kZ + "رود");
  CHECK(fix_pseudo_space("میرود", rules()) == "میرود");
  CHECK(fix_pseudo_space("سریع تر است", rules()) == "سریع" + kZ + "تر است");
  CHECK(fix_pseudo_space("نمی رود", rules()) == "نمی" + kZ + "رود");
  CHECK(fix_pseudo_space("رفته ایم", rules()) == "رفته" + kZ + "ایم");
  CHECK(fix_pseudo_space("سریع ترین", rules()) == "سریع" + kZ + "ترین");
}

TEST_CASE("the ye suffix needs a preceding word of two or more letters") {
  CHECK(fix_pseudo_space("مجموعه ی", rules()) == "مجموعه" + kZ + "ی");
  CHECK(fix_pseudo_space("و ی", rules()) == "و ی");
  CHECK(fix_pseudo_space("12 ی", rules()) == "12 ی");
}

TEST_CASE("affix joins apply to pairs only, one pass") {
  CHECK(fix_pseudo_space("کتاب ها ی", rules()) == "کتاب" + kZ + "ها ی");
  CHECK(fix_pseudo_space("کتاب ها می رود", rules()) == "کتاب" + kZ + "ها می" + kZ + "رود");
}

TEST_CASE("existing pseudo-spaces and irregular spacing are left alone") {
  const std::string solid = "کتاب" + kZ + "ها";
  CHECK(fix_pseudo_space(solid + " ی", rules()) == solid + " ی");
  CHECK(fix_pseudo_space("کتاب  ها", rules()) == "کتاب  ها");
  CHECK(fix_pseudo_space("کتاب\nها", rules()) == "کتاب\nها");
  CHECK(fix_pseudo_space("", rules()) == "");
}

TEST_CASE("separate_marks detaches punctuation") {
  CHECK(separate_marks("رفت؟", marks()) == "رفت ؟");
  CHECK(separate_marks("سلام", marks()) == "سلام");
  CHECK(separate_marks("گفت: «خب»", MarkSet{{":"}}) == "گفت : «خب»");
  CHECK(separate_marks("(کتاب)", marks()) == "( کتاب )");
  CHECK(separate_marks("رفت...", marks()) == "رفت ...");
  CHECK(separate_marks("<<خب>>", marks()) == "<< خب >>");
  CHECK(separate_marks("الف،ب", marks()) == "الف ، ب");
  CHECK(separate_marks("؟!", marks()) == "؟!");
}

TEST_CASE("split_sentences keeps terminal marks with their sentence") {
  CHECK(split_sentences("الف رفت . ب آمد .") == std::vector<std::string>{"الف رفت .", "ب آمد ."});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("بدون پایان") == std::vector<std::string>{"بدون پایان"});
  CHECK(split_sentences("یک\nدو") == std::vector<std::string>{"یک", "دو"});
  CHECK(split_sentences("چرا ؟! باشه") == std::vector<std::string>{"چرا ؟!", "باشه"});
  CHECK(split_sentences(" . \n\n ") == std::vector<std::string>{"."});
}

TEST_CASE("tokenize splits on spaces and never on ZWNJ") {
  CHECK(tokenize("کتاب" + kZ + "ها خوب است") == std::vector<std::string>{"کتاب" + kZ + "ها", "خوب", "است"});
  CHECK(tokenize("الف  ب") == std::vector<std::string>{"الف", "ب"});
  CHECK(tokenize("").empty());
}

TEST_CASE("normalize_pipeline composes the stages") {
  CHECK(normalize_pipeline("کتاب ها رفتند.", rules(), marks()).sentences ==
        std::vector<std::vector<std::string>>{{"کتاب" + kZ + "ها", "رفتند", "."}});
  CHECK(normalize_pipeline("", rules(), marks()).sentences.empty());
  CHECK(normalize_pipeline("می رود؟ می رود!", rules(), marks()).sentences ==
        std::vector<std::vector<std::string>>{{"می" + kZ + "رود", "؟"}, {"می" + kZ + "رود", "!"}});
}

TEST_CASE("ASCII text without marks tokenizes like a whitespace split") {
  const std::string text = "the quick  brown\tfox\njumped over the lazy dog";
  std::vector<std::string> flat;
  for (const auto& s : normalize_pipeline(text, rules(), marks()).sentences) flat.insert(flat.end(), s.begin(), s.end());
  CHECK(flat == std::vector<std::string>{"the", "quick", "brown", "fox", "jumped", "over", "the", "lazy", "dog"});
}

TEST_CASE("normalization properties hold on fuzzed text") {
  const auto corpus = farsivec::testing::fuzz_corpus(2000, 17);
  for (const auto& sentence : corpus) {
    CAPTURE(sentence);
    const auto joined = fix_pseudo_space(sentence, rules());
    CHECK(fix_pseudo_space(joined, rules()) == joined);
    CHECK(visible_chars(joined) == visible_chars(sentence));

    const auto detached = separate_marks(sentence, marks());
    CHECK(separate_marks(detached, marks()) == detached);

    const auto stream = normalize_pipeline(sentence, rules(), marks());
    for (const auto& s : stream.sentences) {
      CHECK_FALSE(s.empty());
      for (const auto& token : s) {
        CHECK_FALSE(token.empty());
        CHECK(token.find(' ') == std::string::npos);
      }
    }
  }
}

TEST_CASE("separated marks are never adjacent to a letter") {
  const auto corpus = farsivec::testing::fuzz_corpus(500, 99);
  const auto m = marks();
  for (const auto& sentence : corpus) {
    const auto out = utf8::decode(separate_marks(sentence, m));
    for (const auto& mark_text : m.marks) {
      const auto mark = utf8::decode(mark_text);
      for (auto pos = out.find(mark); pos != std::u32string::npos; pos = out.find(mark, pos + 1)) {
        if (pos > 0) CHECK_FALSE(utf8::is_letter(out[pos - 1]));
        if (pos + mark.size() < out.size()) CHECK_FALSE(utf8::is_letter(out[pos + mark.size()]));
      }
    }
  }
}

TEST_CASE("rule files replace the sections they contain") {
  const auto config = parse_normalization_config(
      "[prefixes]\nمی\n\n[marks]\n()\n؟\n<<>>\n[boilerplate]\nFooter\n");
  CHECK(config.rules.prefixes == std::vector<std::string>{"می"});
  CHECK(config.rules.suffixes == AffixRuleSet::persian_defaults().suffixes);
  CHECK(config.marks.marks == std::vector<std::string>{"(", ")", "؟", "<<", ">>"});
  CHECK(config.html.boilerplate_prefixes == std::vector<std::string>{"Footer"});
}

TEST_CASE("invalid rule files are rejected") {
  CHECK_THROWS_AS(parse_normalization_config("[colors]\nred\n"), ConfigError);
  CHECK_THROWS_AS(parse_normalization_config("orphan\n"), ConfigError);
  CHECK_THROWS_AS(parse_normalization_config("[prefixes]\nها\n"), ConfigError);  // also a suffix
  CHECK_THROWS_AS(parse_normalization_config("[marks]\nالف\n"), ConfigError);
  CHECK_THROWS_AS(parse_normalization_config("[marks]\n"), ConfigError);
  CHECK_THROWS_AS((AffixRuleSet{{"a" + kZ + "b"}, {}}.validate()), ConfigError);
}
