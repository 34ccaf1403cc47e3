#include "farsivec/embedding_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "farsivec/error.hpp"

namespace farsivec {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

std::size_t parse_id(std::string_view field, std::size_t line) {
  std::size_t id = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
  if (ec != std::errc() || end != field.data() + field.size() || field.empty()) {
    throw ParseError(line, "invalid id '" + std::string(field) + "'");
  }
  return id;
}

double parse_component(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size() || field.empty() || !std::isfinite(value)) {
    throw ParseError(line, "invalid vector component '" + std::string(field) + "'");
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void EmbeddingSet::validate() const {
  if (vectors.rows != vocab.size()) {
    throw ConfigError("embedding rows (" + std::to_string(vectors.rows) + ") differ from vocabulary size (" +
                      std::to_string(vocab.size()) + ")");
  }
  if (vectors.cols == 0) throw ConfigError("embedding dimension must be at least 1");
  for (const double v : vectors.data) {
    if (!std::isfinite(v)) throw ConfigError("embedding contains a non-finite value");
  }
}

std::string format_component(double value) {
  char buffer[64];
  const int n = std::snprintf(buffer, sizeof(buffer), "%.18e", value);
  return std::string(buffer, static_cast<std::size_t>(n));
}

void write_vocab(const Vocabulary& vocab, std::ostream& out) {
  const auto& entries = vocab.entries();
  for (std::size_t id = 0; id < entries.size(); ++id) out << id << '\t' << entries[id].word << '\n';
  if (!out) throw Error("failed to write vocabulary");
}

void write_vectors(const EmbeddingSet& embeddings, std::ostream& out) {
  embeddings.validate();
  std::string line;
  for (std::size_t id = 0; id < embeddings.vectors.rows; ++id) {
    line = std::to_string(id);
    for (const double v : embeddings.vectors.row(id)) {
      line.push_back('\t');
      line += format_component(v);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw Error("failed to write vectors");
}

EmbeddingSet read_embeddings(std::istream& vocab_in, std::istream& vectors_in) {
  std::vector<Vocabulary::Entry> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(vocab_in, line)) {
    ++line_number;
    strip_cr(line);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_number, "vocabulary line lacks a TAB separator");
    const std::size_t id = parse_id(std::string_view(line).substr(0, tab), line_number);
    if (id != entries.size()) {
      throw ParseError(line_number, "expected id " + std::to_string(entries.size()) + ", found " + std::to_string(id));
    }
    const std::string word = line.substr(tab + 1);
    if (word.empty()) throw ParseError(line_number, "empty word");
    entries.push_back({word, 0});
  }
  Vocabulary vocab = [&] {
    try {
      return Vocabulary(std::move(entries));
    } catch (const ConfigError& e) {
      throw InconsistentFilesError(std::string("vocabulary file: ") + e.what());
    }
  }();

  const std::size_t n = vocab.size();
  Matrix vectors;
  std::vector<bool> seen(n, false);
  line_number = 0;
  while (std::getline(vectors_in, line)) {
    ++line_number;
    strip_cr(line);
    if (line.empty()) throw ParseError(line_number, "empty vector line");
    const auto fields = split_tabs(line);
    if (fields.size() < 2) throw ParseError(line_number, "vector line has no components");
    if (line_number == 1) vectors = Matrix(n, fields.size() - 1);
    if (fields.size() - 1 != vectors.cols) {
      throw ParseError(line_number, "expected " + std::to_string(vectors.cols) + " components, found " +
                                        std::to_string(fields.size() - 1));
    }
    const std::size_t id = parse_id(fields[0], line_number);
    if (id >= n) throw InconsistentFilesError("vector file line " + std::to_string(line_number) + ": unknown id " + std::to_string(id));
    if (seen[id]) throw InconsistentFilesError("vector file line " + std::to_string(line_number) + ": duplicate id " + std::to_string(id));
    seen[id] = true;
    auto row = vectors.row(id);
    for (std::size_t k = 0; k < vectors.cols; ++k) row[k] = parse_component(fields[k + 1], line_number);
  }
  for (std::size_t id = 0; id < n; ++id) {
    if (!seen[id]) throw InconsistentFilesError("vector file has no row for id " + std::to_string(id));
  }
  return EmbeddingSet{std::move(vocab), std::move(vectors)};
}

void write_embedding_files(const EmbeddingSet& embeddings, const std::filesystem::path& vocab_path,
                           const std::filesystem::path& vectors_path) {
  std::ofstream vocab_out(vocab_path, std::ios::binary);
  if (!vocab_out) throw Error("cannot open " + vocab_path.string() + " for writing");
  write_vocab(embeddings.vocab, vocab_out);
  std::ofstream vectors_out(vectors_path, std::ios::binary);
  if (!vectors_out) throw Error("cannot open " + vectors_path.string() + " for writing");
  write_vectors(embeddings, vectors_out);
}

EmbeddingSet read_embedding_files(const std::filesystem::path& vocab_path, const std::filesystem::path& vectors_path) {
  std::ifstream vocab_in(vocab_path, std::ios::binary);
  if (!vocab_in) throw Error("cannot open " + vocab_path.string());
  std::ifstream vectors_in(vectors_path, std::ios::binary);
  if (!vectors_in) throw Error("cannot open " + vectors_path.string());
  return read_embeddings(vocab_in, vectors_in);
}

}  // namespace farsivec
