#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "farsivec/dense.hpp"
#include "farsivec/random.hpp"
#include "farsivec/vocabulary.hpp"

namespace farsivec::word2vec {

enum class Mode { kCbow, kSkipGram };

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

struct Config {
  std::size_t batch_size = 128;
  std::size_t embedding_size = 128;
  std::size_t skip_window = 1;
  std::size_t num_steps = 100000;
  /// When positive, overrides num_steps with enough batches for this many passes.
  std::size_t num_epochs = 0;
  std::size_t negatives = 64;
  double learning_rate = 1.0;  // decays linearly to 10% over the run
  std::uint64_t seed = 1;
  Mode mode = Mode::kCbow;
  std::size_t threads = 1;

  void validate() const;
};

struct Model {
  Matrix input;
  Matrix output;
  std::vector<double> output_bias;

  /// Input vectors uniform in (-0.5/D, 0.5/D); output weights and biases zero.
  static Model initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

  std::size_t vocab_size() const noexcept { return input.rows; }
  std::size_t dim() const noexcept { return input.cols; }
  bool operator==(const Model&) const = default;
};

/// Positions of a corpus that have a full window on both sides inside their sentence.
class CenterIndex {
 public:
  /// Throws InsufficientDataError when no sentence is longer than 2 * skip_window.
  CenterIndex(const EncodedCorpus& corpus, std::size_t skip_window);

  std::size_t size() const noexcept { return centers_.size(); }
  std::size_t skip_window() const noexcept { return window_; }
  WordId center(std::size_t n) const { return tokens_[centers_[n]]; }
  /// Context of center n, left to right, skipping the center itself.
  WordId context(std::size_t n, std::size_t slot) const;

 private:
  std::vector<WordId> tokens_;
  std::vector<std::size_t> centers_;
  std::size_t window_;
};

struct CbowBatch {
  std::size_t width = 0;          // 2 * skip_window
  std::vector<WordId> contexts;   // batch_size rows of `width` ids
  std::vector<WordId> targets;
  std::uint64_t cursor = 0;       // next center

  std::span<const WordId> context(std::size_t b) const { return {contexts.data() + b * width, width}; }
};

struct SkipGramBatch {
  std::vector<WordId> centers;
  std::vector<WordId> contexts;
  std::uint64_t cursor = 0;  // next (center, context) pair
};

/// One example per center; the cursor counts centers and wraps at the end.
CbowBatch generate_cbow_batch(const CenterIndex& index, std::size_t batch_size, std::uint64_t cursor);
CbowBatch generate_cbow_batch(std::span<const WordId> ids, std::size_t skip_window, std::size_t batch_size,
                              std::uint64_t cursor);

/// 2 * skip_window pairs per center in left-to-right order; the cursor counts pairs.
SkipGramBatch generate_skipgram_pairs(const CenterIndex& index, std::size_t batch_size, std::uint64_t cursor);
SkipGramBatch generate_skipgram_pairs(std::span<const WordId> ids, std::size_t skip_window, std::size_t batch_size,
                                      std::uint64_t cursor);

/// Mean of the input rows of `inputs` (a single id for skip-gram).
std::vector<double> hidden_state(const Model& model, std::span<const WordId> inputs);

/// -log s(h.u_t + c_t) - sum_n log s(-h.u_n - c_n)
double nce_forward(const Model& model, std::span<const double> hidden, WordId target,
                   std::span<const WordId> negatives);

struct NceGradients {
  double loss = 0.0;
  std::map<WordId, std::vector<double>> input;
  std::map<WordId, std::vector<double>> output;
  std::map<WordId, double> output_bias;
};

/// Loss and its gradient with respect to every parameter row it touches.
NceGradients nce_gradients(const Model& model, std::span<const WordId> inputs, WordId target,
                           std::span<const WordId> negatives);

/// Applies one SGD update for a single example in place and returns the
/// example's loss before the update. With distinct ids this equals
/// subtracting lr times nce_gradients().
double sgd_step(Model& model, std::span<const WordId> inputs, WordId target, std::span<const WordId> negatives,
                double lr);

/// Noise distribution proportional to count^0.75, drawn with Walker's alias
/// method.
class UnigramSampler {
 public:
  explicit UnigramSampler(std::span<const std::uint64_t> counts, double power = 0.75);
  WordId sample(Rng& rng) const;
  /// `count` draws, each re-drawn up to 100 times while it equals `target`.
  void sample_negatives(Rng& rng, WordId target, std::size_t count, std::vector<WordId>& out) const;

 private:
  WordId pick(std::uint32_t bits) const;

  std::vector<std::uint64_t> accept_;  // keep the slot when the 32-bit coin falls below this
  std::vector<WordId> alias_;
};

struct StepReport {
  std::size_t step = 0;
  double loss = 0.0;  // exponentially smoothed per-example loss
};

struct TrainResult {
  Model model;
  std::vector<StepReport> history;
  double final_loss = 0.0;
  std::size_t steps = 0;
};

/// Plain SGD with negative sampling; each example applies its update with
/// step learning_rate / batch_size. Throws TrainingDivergedError on a
/// non-finite loss.
TrainResult train(const EncodedCorpus& corpus, std::size_t vocab_size, const Config& config,
                  const std::function<void(const StepReport&)>& on_report = {}, std::size_t report_every = 1000);

/// The input embeddings.
Matrix final_vectors(const Model& model);

}  // namespace farsivec::word2vec
