#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "farsivec/dense.hpp"
#include "farsivec/vocabulary.hpp"

namespace farsivec {

/// One vector per vocabulary entry, row n belonging to id n.
struct EmbeddingSet {
  Vocabulary vocab;
  Matrix vectors;

  /// Throws ConfigError unless rows == vocab size, D >= 1 and every value is finite.
  void validate() const;
};

/// "%.18e", e.g. -6.413674354553222656e-02.
std::string format_component(double value);

/// "id<TAB>word" per entry, in id order.
void write_vocab(const Vocabulary& vocab, std::ostream& out);

/// "id<TAB>c_1<TAB>...<TAB>c_D" per word, in id order.
void write_vectors(const EmbeddingSet& embeddings, std::ostream& out);

/// Reads the two files back. Counts are not stored on disk and read as zero.
/// Throws ParseError (with line number) on malformed lines and
/// InconsistentFilesError when the ids of the two files disagree.
EmbeddingSet read_embeddings(std::istream& vocab_in, std::istream& vectors_in);

void write_embedding_files(const EmbeddingSet& embeddings, const std::filesystem::path& vocab_path,
                           const std::filesystem::path& vectors_path);
EmbeddingSet read_embedding_files(const std::filesystem::path& vocab_path, const std::filesystem::path& vectors_path);

}  // namespace farsivec
