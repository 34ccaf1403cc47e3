#include "farsivec/query.hpp"

#include <algorithm>
#include <cmath>

#include "farsivec/error.hpp"

namespace farsivec {

namespace {

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  const double su = max_abs(u);
  const double sv = max_abs(v);
  if (su == 0.0 && sv == 0.0) throw UndefinedSimilarityError("cosine of two zero vectors");
  if (su == 0.0 || sv == 0.0) return 0.0;
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = u[k] / su;
    const double b = v[k] / sv;
    uu += a * a;
    vv += b * b;
    uv += a * b;
  }
  return std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
}

std::vector<Neighbor> nearest(const EmbeddingSet& embeddings, std::string_view word, std::size_t k) {
  if (k == 0) throw ConfigError("k must be at least 1");
  const auto& vocab = embeddings.vocab;
  if (!vocab.contains(word)) throw NotInVocabularyError(std::string(word));
  const WordId query = vocab.lookup_id(word);
  const auto q = embeddings.vectors.row(query);

  struct Scored {
    WordId id;
    double score;
  };
  std::vector<Scored> scored;
  scored.reserve(vocab.size());
  const bool query_zero = max_abs(q) == 0.0;
  for (WordId id = 2; id < vocab.size(); ++id) {
    if (id == query) continue;
    const auto row = embeddings.vectors.row(id);
    const double s = (query_zero && max_abs(row) == 0.0) ? 0.0 : cosine(q, row);
    scored.push_back({id, s});
  }
  const std::size_t take = std::min(k, scored.size());
  const auto by_score = [](const Scored& a, const Scored& b) { return a.score != b.score ? a.score > b.score : a.id < b.id; };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), by_score);

  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t n = 0; n < take; ++n) out.push_back({vocab.lookup_word(scored[n].id), scored[n].score});
  return out;
}

}  // namespace farsivec
