#include "farsivec/normalize.hpp"

#include <algorithm>
#include <sstream>

#include "farsivec/error.hpp"
#include "farsivec/utf8.hpp"

namespace farsivec {
namespace {

constexpr std::string_view kSuffixYe = "ی";

bool contains(const std::vector<std::string>& set, std::string_view s) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

bool has_letter(std::u32string_view token) {
  return std::any_of(token.begin(), token.end(), utf8::is_letter);
}

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'؟'; }

std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && utf8::is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && utf8::is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Bracket pairs written as one entry ("()", "[]", "<<>>") stand for their two halves.
std::vector<std::string> expand_mark_entry(std::string_view entry) {
  if (entry == "()" || entry == "[]" || entry == "{}") {
    return {std::string(entry.substr(0, 1)), std::string(entry.substr(1, 1))};
  }
  if (entry == "<<>>") return {"<<", ">>"};
  return {std::string(entry)};
}

}  // namespace

AffixRuleSet AffixRuleSet::persian_defaults() {
  return AffixRuleSet{
      {"می", "نمی"},
      {"ها", "های", "هایی", "ام", "ای", "ایم", "اید", "اند", "ی", "تر", "ترین"},
  };
}

void AffixRuleSet::validate() const {
  auto check = [](const std::vector<std::string>& set, const char* name) {
    for (const auto& entry : set) {
      if (entry.empty()) throw ConfigError(std::string("empty entry in ") + name);
      if (!utf8::is_valid(entry)) throw ConfigError(std::string("invalid UTF-8 in ") + name);
      for (char32_t cp : utf8::decode(entry)) {
        if (utf8::is_space(cp) || cp == utf8::kZwnj) {
          throw ConfigError(std::string(name) + " entry contains whitespace or ZWNJ: '" + entry + "'");
        }
      }
    }
  };
  check(prefixes, "prefixes");
  check(suffixes, "suffixes");
  for (const auto& p : prefixes) {
    if (contains(suffixes, p)) throw ConfigError("'" + p + "' is both a prefix and a suffix");
  }
}

MarkSet MarkSet::persian_defaults() {
  return MarkSet{{"(", ")", "«", "»", "<<", ">>", "•", "/", "؛", "،", "=", "-", ":", "%", "...", "؟", "[", "]", "!",
                  ".", "?"}};
}

void MarkSet::validate() const {
  if (marks.empty()) throw ConfigError("mark set is empty");
  for (const auto& mark : marks) {
    if (mark.empty()) throw ConfigError("empty mark");
    if (!utf8::is_valid(mark)) throw ConfigError("invalid UTF-8 in mark");
    for (char32_t cp : utf8::decode(mark)) {
      if (utf8::is_persian_letter(cp) || utf8::is_space(cp)) {
        throw ConfigError("mark contains a letter or whitespace: '" + mark + "'");
      }
    }
  }
}

std::size_t TokenStream::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

NormalizationConfig parse_normalization_config(std::string_view text) {
  if (!utf8::is_valid(text)) throw ConfigError("rules file is not valid UTF-8");
  NormalizationConfig config;
  std::vector<std::string>* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string_view line = trim_ascii(raw);
    if (line.empty()) continue;
    if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
      const std::string_view name = line.substr(1, line.size() - 2);
      const bool is_header = std::all_of(name.begin(), name.end(), [](char c) { return c >= 'a' && c <= 'z'; });
      if (is_header) {
        if (name == "prefixes") {
          current = &config.rules.prefixes;
        } else if (name == "suffixes") {
          current = &config.rules.suffixes;
        } else if (name == "marks") {
          current = &config.marks.marks;
        } else if (name == "boilerplate") {
          current = &config.html.boilerplate_prefixes;
        } else {
          throw ConfigError("line " + std::to_string(line_number) + ": unknown section [" + std::string(name) + "]");
        }
        current->clear();
        continue;
      }
    }
    if (current == nullptr) {
      throw ConfigError("line " + std::to_string(line_number) + ": entry outside of any section");
    }
    if (current == &config.marks.marks) {
      for (auto& m : expand_mark_entry(line)) current->push_back(std::move(m));
    } else {
      current->emplace_back(line);
    }
  }
  config.rules.validate();
  config.marks.validate();
  return config;
}

NormalizationConfig load_normalization_config(const std::filesystem::path& path) {
  try {
    return parse_normalization_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string fix_pseudo_space(std::string_view text, const AffixRuleSet& rules) {
  const std::u32string chars = utf8::decode(text);

  struct Run {
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Run> tokens;
  for (std::size_t pos = 0; pos < chars.size();) {
    if (utf8::is_space(chars[pos])) {
      ++pos;
      continue;
    }
    const std::size_t begin = pos;
    while (pos < chars.size() && !utf8::is_space(chars[pos])) ++pos;
    tokens.push_back({begin, pos});
  }

  std::vector<std::string> token_text(tokens.size());
  std::vector<bool> frozen(tokens.size());
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const std::u32string_view view(chars.data() + tokens[k].begin, tokens[k].end - tokens[k].begin);
    token_text[k] = utf8::encode(view);
    // Tokens already carrying a pseudo-space are never joined again.
    frozen[k] = view.find(utf8::kZwnj) != std::u32string_view::npos || !has_letter(view);
  }

  std::u32string out = chars;
  for (std::size_t k = 0; k + 1 < tokens.size(); ++k) {
    const bool single_space = tokens[k + 1].begin == tokens[k].end + 1 && chars[tokens[k].end] == U' ';
    if (!single_space || frozen[k] || frozen[k + 1]) continue;

    const std::string& left = token_text[k];
    const std::string& right = token_text[k + 1];
    bool join = contains(rules.prefixes, left);
    if (!join && contains(rules.suffixes, right)) {
      if (right == kSuffixYe) {
        // "ی" doubles as a standalone word; only attach it to a word of two or more letters.
        const std::size_t len = tokens[k].end - tokens[k].begin;
        join = len >= 2 && utf8::is_letter(chars[tokens[k].end - 1]);
      } else {
        join = true;
      }
    }
    if (join) {
      out[tokens[k].end] = utf8::kZwnj;
      frozen[k + 1] = true;
    }
  }
  return utf8::encode(out);
}

std::string separate_marks(std::string_view text, const MarkSet& marks) {
  const std::u32string chars = utf8::decode(text);
  std::vector<std::u32string> patterns;
  patterns.reserve(marks.marks.size());
  for (const auto& m : marks.marks) patterns.push_back(utf8::decode(m));
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  enum class Kind { kSpace, kMark, kOther };
  std::u32string out;
  out.reserve(chars.size() + chars.size() / 4);
  Kind previous = Kind::kSpace;
  for (std::size_t pos = 0; pos < chars.size();) {
    if (utf8::is_space(chars[pos])) {
      out.push_back(chars[pos++]);
      previous = Kind::kSpace;
      continue;
    }
    std::size_t match = 0;
    for (const auto& p : patterns) {
      if (!p.empty() && chars.compare(pos, p.size(), p) == 0) {
        match = p.size();
        break;
      }
    }
    const Kind kind = match > 0 ? Kind::kMark : Kind::kOther;
    if ((kind == Kind::kMark && previous == Kind::kOther) || (kind == Kind::kOther && previous == Kind::kMark)) {
      out.push_back(U' ');
    }
    const std::size_t len = match > 0 ? match : 1;
    out.append(chars, pos, len);
    pos += len;
    previous = kind;
  }
  return utf8::encode(out);
}

std::vector<std::string> split_sentences(std::string_view text) {
  const std::u32string chars = utf8::decode(text);
  std::vector<std::string> sentences;
  auto flush = [&](std::size_t begin, std::size_t end) {
    const std::string fragment = utf8::encode(std::u32string_view(chars.data() + begin, end - begin));
    const std::string_view trimmed = trim_ascii(fragment);
    if (!trimmed.empty()) sentences.emplace_back(trimmed);
  };
  std::size_t begin = 0;
  for (std::size_t pos = 0; pos < chars.size();) {
    if (chars[pos] == U'\n') {
      flush(begin, pos);
      begin = ++pos;
      continue;
    }
    if (is_terminal(chars[pos])) {
      while (pos < chars.size() && is_terminal(chars[pos])) ++pos;
      flush(begin, pos);
      begin = pos;
      continue;
    }
    ++pos;
  }
  flush(begin, chars.size());
  return sentences;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < sentence.size()) {
    while (pos < sentence.size() && utf8::is_space(static_cast<unsigned char>(sentence[pos]))) ++pos;
    const std::size_t begin = pos;
    while (pos < sentence.size() && !utf8::is_space(static_cast<unsigned char>(sentence[pos]))) ++pos;
    if (pos > begin) tokens.emplace_back(sentence.substr(begin, pos - begin));
  }
  return tokens;
}

TokenStream normalize_pipeline(std::string_view text, const AffixRuleSet& rules, const MarkSet& marks) {
  const std::string detached = separate_marks(text, marks);
  const std::string joined = fix_pseudo_space(detached, rules);
  TokenStream stream;
  for (const auto& sentence : split_sentences(joined)) {
    auto tokens = tokenize(sentence);
    if (!tokens.empty()) stream.sentences.push_back(std::move(tokens));
  }
  return stream;
}

}  // namespace farsivec
