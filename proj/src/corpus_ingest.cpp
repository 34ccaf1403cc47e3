#include "farsivec/corpus_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "farsivec/error.hpp"
#include "farsivec/utf8.hpp"

namespace farsivec {
namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_ascii_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_ascii_space(line[pos])) ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_void_element(std::string_view name) {
  static constexpr std::array<std::string_view, 9> kVoid = {"br", "meta", "link", "img", "hr",
                                                            "input", "area", "base", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), name) != kVoid.end();
}

bool is_break_element(std::string_view name) {
  static constexpr std::array<std::string_view, 21> kBreaks = {
      "br", "p", "div", "li", "ul", "ol", "tr", "td", "th", "table", "h1",
      "h2", "h3", "h4", "h5", "h6", "body", "html", "section", "article", "blockquote"};
  return std::find(kBreaks.begin(), kBreaks.end(), name) != kBreaks.end();
}

// Decodes the entity starting at `pos` ('&'). Returns bytes consumed, 0 if not an entity.
std::size_t decode_entity(std::string_view s, std::size_t pos, std::string& out) {
  const std::size_t semi = s.find(';', pos);
  if (semi == std::string_view::npos || semi - pos > 10) return 0;
  const std::string_view name = s.substr(pos + 1, semi - pos - 1);
  if (name.empty()) return 0;
  if (name[0] == '#') {
    unsigned long cp = 0;
    try {
      if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
        cp = std::stoul(std::string(name.substr(2)), nullptr, 16);
      } else {
        cp = std::stoul(std::string(name.substr(1)), nullptr, 10);
      }
    } catch (const std::exception&) {
      return 0;
    }
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    out += utf8::encode(static_cast<char32_t>(cp));
    return semi - pos + 1;
  }
  static const std::array<std::pair<std::string_view, std::string_view>, 7> kNamed = {{
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}, {"zwnj", "\xE2\x80\x8C"},
  }};
  for (const auto& [key, value] : kNamed) {
    if (name == key) {
      out += value;
      return semi - pos + 1;
    }
  }
  return 0;
}

// Angle brackets never survive into extracted text: doubled ones are the
// ASCII spelling of guillemets, lone ones are dropped.
std::string replace_angle_brackets(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c != '<' && c != '>') {
      out.push_back(c);
      continue;
    }
    if (i + 1 < s.size() && s[i + 1] == c) {
      out += (c == '<') ? "\xC2\xAB" : "\xC2\xBB";
      ++i;
    }
  }
  return out;
}

struct Tag {
  std::string name;
  bool closing = false;
  bool self_closing = false;
};

Tag parse_tag(std::string_view inner) {
  Tag tag;
  std::size_t pos = 0;
  while (pos < inner.size() && is_ascii_space(inner[pos])) ++pos;
  if (pos < inner.size() && inner[pos] == '/') {
    tag.closing = true;
    ++pos;
  }
  const std::size_t start = pos;
  while (pos < inner.size() && (std::isalnum(static_cast<unsigned char>(inner[pos])) || inner[pos] == '-')) ++pos;
  tag.name = lower_ascii(inner.substr(start, pos - start));
  tag.self_closing = !inner.empty() && inner.back() == '/';
  return tag;
}

}  // namespace

TaggedLine parse_lbl_line(std::string_view line, std::size_t line_number) {
  const auto fields = split_fields(line);
  if (fields.size() < 2) {
    throw ParseError(line_number, "malformed tagged line (expected '<surface> <tag>'): '" + std::string(line) + "'");
  }
  TaggedLine out;
  out.tag = std::string(fields.back());
  for (std::size_t k = 0; k + 1 < fields.size(); ++k) {
    if (k > 0) out.surface.push_back(' ');
    out.surface += fields[k];
  }
  return out;
}

std::vector<TaggedLine> parse_lbl(std::string_view text) {
  if (!utf8::is_valid(text)) throw EncodingError("tagged corpus is not valid UTF-8");
  std::vector<TaggedLine> lines;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_number;
    const std::string_view line = text.substr(pos, end - pos);
    if (std::any_of(line.begin(), line.end(), [](char c) { return !is_ascii_space(c); })) {
      lines.push_back(parse_lbl_line(line, line_number));
    }
    pos = end + 1;
  }
  return lines;
}

std::string strip_tags(std::span<const TaggedLine> lines) {
  std::string out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (k > 0) out.push_back(' ');
    out += lines[k].surface;
  }
  return out;
}

std::string extract_html_text(const RawDocument& doc, const HtmlOptions& options) {
  const std::string_view body = doc.body;
  if (!utf8::is_valid(body)) throw ExtractionError(doc.source_id, "document is not valid UTF-8");

  std::string text;
  std::vector<std::string> skip_stack;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const char c = body[pos];
    if (c == '<') {
      if (body.compare(pos, 4, "<!--") == 0) {
        const std::size_t end = body.find("-->", pos + 4);
        if (end == std::string_view::npos) throw ExtractionError(doc.source_id, "unterminated comment");
        pos = end + 3;
        continue;
      }
      const bool is_markup = pos + 1 < body.size() &&
                             (std::isalpha(static_cast<unsigned char>(body[pos + 1])) || body[pos + 1] == '/' ||
                              body[pos + 1] == '!' || body[pos + 1] == '?');
      if (!is_markup) {
        if (skip_stack.empty()) text.push_back(c);
        ++pos;
        continue;
      }
      // Scan to the closing '>' honoring quoted attribute values.
      std::size_t end = pos + 1;
      char quote = 0;
      while (end < body.size()) {
        const char d = body[end];
        if (quote != 0) {
          if (d == quote) quote = 0;
        } else if (d == '"' || d == '\'') {
          quote = d;
        } else if (d == '>') {
          break;
        }
        ++end;
      }
      if (end >= body.size()) throw ExtractionError(doc.source_id, "unterminated tag at byte " + std::to_string(pos));
      const std::string_view inner = body.substr(pos + 1, end - pos - 1);
      pos = end + 1;
      if (inner.empty() || inner[0] == '!' || inner[0] == '?') continue;

      const Tag tag = parse_tag(inner);
      if (tag.name == "body") skip_stack.clear();
      const bool skipped = std::find(options.skipped_elements.begin(), options.skipped_elements.end(), tag.name) !=
                           options.skipped_elements.end();
      if (skipped && !is_void_element(tag.name) && !tag.self_closing) {
        if (!tag.closing) {
          skip_stack.push_back(tag.name);
        } else {
          const auto it = std::find(skip_stack.rbegin(), skip_stack.rend(), tag.name);
          if (it != skip_stack.rend()) skip_stack.erase(std::next(it).base(), skip_stack.end());
        }
        continue;
      }
      if (is_break_element(tag.name)) text.push_back('\n');
      continue;
    }
    if (!skip_stack.empty()) {
      ++pos;
      continue;
    }
    if (c == '&') {
      const std::size_t used = decode_entity(body, pos, text);
      if (used > 0) {
        pos += used;
        continue;
      }
    }
    text.push_back(c);
    ++pos;
  }

  text = replace_angle_brackets(text);

  std::string out;
  std::istringstream lines(text);
  std::string raw;
  while (std::getline(lines, raw)) {
    std::string line;
    for (const auto field : split_fields(raw)) {
      if (!line.empty()) line.push_back(' ');
      line += field;
    }
    if (line.empty()) continue;
    const bool boilerplate = std::any_of(options.boilerplate_prefixes.begin(), options.boilerplate_prefixes.end(),
                                         [&](const std::string& p) { return line.rfind(p, 0) == 0; });
    if (boilerplate) continue;
    if (!out.empty()) out.push_back(' ');
    out += line;
  }
  return out;
}

std::string merge_corpora(std::span<const std::string> texts) {
  std::string out;
  for (std::size_t k = 0; k < texts.size(); ++k) {
    if (k > 0) out.push_back('\n');
    out += texts[k];
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("read failure on " + path.string());
  return buffer.str();
}

std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw Error("no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace farsivec
