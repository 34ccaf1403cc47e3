#include "farsivec/cooccurrence.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <ostream>
#include <thread>

#include "farsivec/error.hpp"

namespace farsivec {

void CooccurrenceMatrix::add(WordId i, WordId j, double x) {
  if (i >= vocab_size_ || j >= vocab_size_) {
    throw CorruptStreamError("word id " + std::to_string(std::max(i, j)) + " outside vocabulary of size " +
                             std::to_string(vocab_size_));
  }
  if (!(x > 0.0)) return;
  cells_[key(i, j)] += x;
}

double CooccurrenceMatrix::get(WordId i, WordId j) const {
  const auto it = cells_.find(key(i, j));
  return it == cells_.end() ? 0.0 : it->second;
}

void CooccurrenceMatrix::merge(const CooccurrenceMatrix& other) {
  if (other.vocab_size_ != vocab_size_) throw CorruptStreamError("merging matrices of different vocabulary sizes");
  for (const auto& e : other.entries()) cells_[key(e.i, e.j)] += e.x;
}

std::vector<CooccurrenceEntry> CooccurrenceMatrix::entries() const {
  std::vector<CooccurrenceEntry> out;
  out.reserve(cells_.size());
  for (const auto& [k, x] : cells_) {
    out.push_back({static_cast<WordId>(k >> 32), static_cast<WordId>(k & 0xFFFFFFFFu), x});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  return out;
}

double CooccurrenceMatrix::row_sum(WordId i) const {
  double sum = 0.0;
  for (const auto& e : entries()) {
    if (e.i == i) sum += e.x;
  }
  return sum;
}

CooccurrenceMatrix accumulate(const EncodedCorpus& corpus, std::size_t vocab_size, std::size_t context_size,
                              WindowWeighting weighting) {
  if (context_size == 0) throw ConfigError("context size must be at least 1");
  CooccurrenceMatrix m(vocab_size);
  for (const auto& sentence : corpus) {
    for (std::size_t t = 0; t < sentence.size(); ++t) {
      for (std::size_t d = 1; d <= context_size && t + d < sentence.size(); ++d) {
        const double w = weighting == WindowWeighting::kHarmonic ? 1.0 / static_cast<double>(d) : 1.0;
        m.add(sentence[t], sentence[t + d], w);
        m.add(sentence[t + d], sentence[t], w);
      }
    }
  }
  return m;
}

CooccurrenceMatrix accumulate_sharded(const EncodedCorpus& corpus, std::size_t vocab_size, std::size_t context_size,
                                      std::size_t shards, WindowWeighting weighting) {
  shards = std::max<std::size_t>(1, std::min(shards, std::max<std::size_t>(1, corpus.size())));
  if (shards == 1) return accumulate(corpus, vocab_size, context_size, weighting);

  std::vector<CooccurrenceMatrix> partial(shards, CooccurrenceMatrix(vocab_size));
  std::vector<std::exception_ptr> failures(shards);
  {
    std::vector<std::jthread> workers;
    const std::size_t per_shard = (corpus.size() + shards - 1) / shards;
    for (std::size_t s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] {
        try {
          const std::size_t begin = std::min(corpus.size(), s * per_shard);
          const std::size_t end = std::min(corpus.size(), begin + per_shard);
          const EncodedCorpus slice(corpus.begin() + static_cast<std::ptrdiff_t>(begin),
                                    corpus.begin() + static_cast<std::ptrdiff_t>(end));
          partial[s] = accumulate(slice, vocab_size, context_size, weighting);
        } catch (...) {
          failures[s] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  CooccurrenceMatrix merged = std::move(partial.front());
  for (std::size_t s = 1; s < shards; ++s) merged.merge(partial[s]);
  return merged;
}

double probability_ratio(const CooccurrenceMatrix& m, WordId i, WordId j, WordId k) {
  const double sum_i = m.row_sum(i);
  const double sum_j = m.row_sum(j);
  const double x_jk = m.get(j, k);
  if (sum_i == 0.0 || sum_j == 0.0 || x_jk == 0.0) {
    throw UndefinedRatioError("probability ratio undefined: zero row sum or zero x(j,k)");
  }
  return (m.get(i, k) / sum_i) / (x_jk / sum_j);
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t b = 0; b < sizeof(T); ++b) bytes[b] = static_cast<char>((value >> (8 * b)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) return false;
  value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) value |= static_cast<T>(bytes[b]) << (8 * b);
  return true;
}

}  // namespace

void write_spill(const CooccurrenceMatrix& m, std::ostream& out) {
  for (const auto& e : m.entries()) {
    put_le<std::uint32_t>(out, e.i);
    put_le<std::uint32_t>(out, e.j);
    put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(e.x));
  }
  if (!out) throw Error("failed to write co-occurrence spill");
}

CooccurrenceMatrix read_spill(std::istream& in, std::size_t vocab_size) {
  CooccurrenceMatrix m(vocab_size);
  std::size_t record = 0;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::uint64_t bits = 0;
    if (!get_le(in, i) || !get_le(in, j) || !get_le(in, bits)) {
      throw CorruptStreamError("truncated spill record " + std::to_string(record));
    }
    const double x = std::bit_cast<double>(bits);
    if (!(x > 0.0)) throw CorruptStreamError("non-positive value in spill record " + std::to_string(record));
    m.add(i, j, x);
    ++record;
  }
  return m;
}

}  // namespace farsivec
