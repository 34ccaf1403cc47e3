#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "farsivec/embedding_io.hpp"

namespace farsivec {

struct Neighbor {
  std::string word;
  double score = 0.0;
};

/// u.v / (|u| |v|) clamped to [-1, 1]. Zero when exactly one vector is zero;
/// throws UndefinedSimilarityError when both are.
double cosine(std::span<const double> u, std::span<const double> v);

/// The k most similar words by exhaustive scan, excluding the query and the
/// sentinels. Scores descend; ties go to the smaller id. Throws
/// NotInVocabularyError for an unknown word.
std::vector<Neighbor> nearest(const EmbeddingSet& embeddings, std::string_view word, std::size_t k);

}  // namespace farsivec
