#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "farsivec/corpus_ingest.hpp"

namespace farsivec {

/// Affixes that are rejoined to their neighbour with a pseudo-space (ZWNJ).
struct AffixRuleSet {
  std::vector<std::string> prefixes;
  std::vector<std::string> suffixes;

  static AffixRuleSet persian_defaults();
  /// Throws ConfigError when an entry contains a space or ZWNJ, or the sets overlap.
  void validate() const;
};

/// Punctuation detached from words. Bracket pairs are listed as separate halves.
struct MarkSet {
  std::vector<std::string> marks;

  static MarkSet persian_defaults();
  /// Throws ConfigError when empty or an entry contains a Persian letter or whitespace.
  void validate() const;
};

/// Sentences of tokens. Tokens never contain whitespace and are never empty;
/// they may contain ZWNJ.
struct TokenStream {
  std::vector<std::vector<std::string>> sentences;

  std::size_t token_count() const;
  bool operator==(const TokenStream&) const = default;
};

/// Everything read from a `--rules` file. Sections absent from the file keep defaults.
struct NormalizationConfig {
  AffixRuleSet rules = AffixRuleSet::persian_defaults();
  MarkSet marks = MarkSet::persian_defaults();
  HtmlOptions html;
};

/// Parses "[prefixes]", "[suffixes]", "[marks]" and "[boilerplate]" sections,
/// one entry per line.
NormalizationConfig parse_normalization_config(std::string_view text);
NormalizationConfig load_normalization_config(const std::filesystem::path& path);

std::string fix_pseudo_space(std::string_view text, const AffixRuleSet& rules);
std::string separate_marks(std::string_view text, const MarkSet& marks);
std::vector<std::string> split_sentences(std::string_view text);
std::vector<std::string> tokenize(std::string_view sentence);

/// separate_marks, then fix_pseudo_space, then sentence split and tokenization.
TokenStream normalize_pipeline(std::string_view text, const AffixRuleSet& rules, const MarkSet& marks);

}  // namespace farsivec
