#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace farsivec {

/// One line of a word-per-line tagged corpus: a surface form and its POS tag.
struct TaggedLine {
  std::string surface;
  std::string tag;

  bool operator==(const TaggedLine&) const = default;
};

struct RawDocument {
  std::string source_id;
  std::string body;
};

struct HtmlOptions {
  /// Text lines starting with any of these are metadata, not corpus text.
  std::vector<std::string> boilerplate_prefixes = {"DOC ID", "Date of Document", "Hamshahri corpus document"};
  /// Elements whose whole content is dropped.
  std::vector<std::string> skipped_elements = {"head", "title", "script", "style", "meta"};
};

/// Splits a tagged line: the last whitespace-separated field is the tag and
/// the remaining fields, rejoined by single spaces, are the surface.
/// Throws ParseError (carrying `line_number`) when fewer than two fields exist.
TaggedLine parse_lbl_line(std::string_view line, std::size_t line_number = 1);

/// Parses a whole tagged file; blank lines are skipped. Input must be UTF-8.
std::vector<TaggedLine> parse_lbl(std::string_view text);

std::string strip_tags(std::span<const TaggedLine> lines);

/// Visible body text of an HTML document with markup, head content and
/// boilerplate lines removed. Line breaks collapse to single spaces.
std::string extract_html_text(const RawDocument& doc, const HtmlOptions& options = {});

/// Joins texts in order with a single newline between consecutive items.
std::string merge_corpora(std::span<const std::string> texts);

std::string read_text_file(const std::filesystem::path& path);

/// Regular files under `path` (or `path` itself) in lexicographic filename order.
std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& path);

}  // namespace farsivec
