#include "farsivec/word2vec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "farsivec/error.hpp"

namespace farsivec::word2vec {
namespace {

constexpr std::size_t kMaxRedraws = 100;
constexpr std::uint64_t kFullSlot = std::uint64_t{1} << 32;
constexpr double kSmoothing = 0.95;

template <bool Shared>
double load(const double& x) {
  if constexpr (Shared) {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool Shared>
void sub(double& x, double delta) {
  if constexpr (Shared) {
    std::atomic_ref<double> ref(x);
    ref.store(ref.load(std::memory_order_relaxed) - delta, std::memory_order_relaxed);
  } else {
    x -= delta;
  }
}

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double score(const Model& model, std::span<const double> hidden, WordId id) {
  return dot(hidden, model.output.row(id)) + model.output_bias[id];
}

#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
#define FARSIVEC_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define FARSIVEC_CLONES
#endif

// One output row's share of the loss, split as linear + log(factor) so an
// example needs a single log, plus d(loss)/d(score).
struct Logistic {
  double linear;
  double factor;
  double coef;
};

Logistic logistic(double s, double label) {
  const double e = std::exp(-std::abs(s));
  const double sig = s >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
  return {std::max(label > 0.0 ? -s : s, 0.0), 1.0 + e, sig - label};
}

// Vector kernels are compiled per ISA and picked at load time. Contraction is
// disabled for the library and every reduction has a fixed lane order, so all
// variants round alike.

// scores[r] = h . output[ids[r]] + bias[ids[r]], summed in four fixed lanes.
FARSIVEC_CLONES void score_rows(const double* __restrict h, const double* __restrict output,
                                const double* __restrict bias, const WordId* ids, std::size_t rows, std::size_t dim,
                                double* __restrict scores) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* __restrict u = output + static_cast<std::size_t>(ids[r]) * dim;
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (; k + 4 <= dim; k += 4) {
      for (std::size_t l = 0; l < 4; ++l) acc[l] += h[k + l] * u[k + l];
    }
    for (; k < dim; ++k) acc[0] += h[k] * u[k];
    scores[r] = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + bias[ids[r]];
  }
}

// For distinct rows: grad_h = sum of coefs[r] * output[ids[r]] taken before
// the step, then output[ids[r]] -= lr * coefs[r] * h and the bias step.
FARSIVEC_CLONES void gather_scatter(double* output, double* bias, const WordId* ids, const double* __restrict coefs,
                                    std::size_t rows, std::size_t dim, const double* __restrict h, double lr,
                                    double* __restrict grad_h) {
  for (std::size_t k = 0; k < dim; ++k) grad_h[k] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double* __restrict u = output + static_cast<std::size_t>(ids[r]) * dim;
    const double c = coefs[r];
    const double step = lr * c;
    for (std::size_t k = 0; k < dim; ++k) {
      grad_h[k] += c * u[k];
      u[k] -= step * h[k];
    }
    bias[ids[r]] -= step;
  }
}

struct Scratch {
  std::vector<double> hidden;
  std::vector<double> grad_hidden;
  std::vector<WordId> negatives;
  std::vector<WordId> rows;  // target, then negatives
  std::vector<double> scores;
  std::vector<double> coefs;
  std::vector<WordId> unique;            // distinct rows in first-seen order
  std::vector<std::uint32_t> position;   // row -> index into unique
  std::vector<std::int32_t> slot;        // word -> index into unique, or -1
  std::vector<Logistic> noise;           // logistic of each score at label 0
};

// One SGD step on a single example: every gradient is taken at the parameters
// before the step, so repeated negatives add up. Returns the pre-step loss.
template <bool Shared>
double example_step(Model& model, std::span<const WordId> inputs, WordId target, std::span<const WordId> negatives,
                    double lr, Scratch& scratch) {
  const std::size_t dim = model.dim();
  auto& rows = scratch.rows;
  rows.clear();
  rows.push_back(target);
  rows.insert(rows.end(), negatives.begin(), negatives.end());
  const std::size_t n = rows.size();
  scratch.hidden.assign(dim, 0.0);
  scratch.grad_hidden.resize(dim);
  scratch.scores.resize(n);
  scratch.coefs.resize(n);
  double* h = scratch.hidden.data();
  double* grad_h = scratch.grad_hidden.data();
  double* scores = scratch.scores.data();
  double* coefs = scratch.coefs.data();

  const double inv = 1.0 / static_cast<double>(inputs.size());
  for (const WordId id : inputs) {
    const double* row = model.input.row(id).data();
    for (std::size_t k = 0; k < dim; ++k) h[k] += load<Shared>(row[k]) * inv;
  }

  if constexpr (Shared) {
    for (std::size_t r = 0; r < n; ++r) {
      const double* u = model.output.row(rows[r]).data();
      double acc = load<Shared>(model.output_bias[rows[r]]);
      for (std::size_t k = 0; k < dim; ++k) acc += h[k] * load<Shared>(u[k]);
      scores[r] = acc;
    }
  } else {
    // Repeated rows are scored once and their coefficients summed, which
    // leaves distinct rows for the fused update.
    if (scratch.slot.size() < model.output.rows) scratch.slot.assign(model.output.rows, -1);
    scratch.unique.clear();
    scratch.position.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      std::int32_t& at = scratch.slot[rows[r]];
      if (at < 0) {
        at = static_cast<std::int32_t>(scratch.unique.size());
        scratch.unique.push_back(rows[r]);
      }
      scratch.position[r] = static_cast<std::uint32_t>(at);
    }
    for (const WordId id : scratch.unique) scratch.slot[id] = -1;
    score_rows(h, model.output.data.data(), model.output_bias.data(), scratch.unique.data(), scratch.unique.size(),
               dim, scores);
  }

  // Each distinct score gets one exp; the label only shifts linear and coef.
  const std::size_t m = Shared ? n : scratch.unique.size();
  scratch.noise.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    scratch.noise[j] = logistic(scores[j], 0.0);
    coefs[j] = 0.0;
  }
  double linear = 0.0;
  double product = 1.0;  // each factor is in (1, 2]
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t at = Shared ? r : scratch.position[r];
    const Logistic& z = scratch.noise[at];
    if (r == 0) {
      linear += std::max(-scores[at], 0.0);
      coefs[at] += z.coef - 1.0;
    } else {
      linear += z.linear;
      coefs[at] += z.coef;
    }
    product *= z.factor;
    if (product > 0x1p900) {
      linear += std::log(product);
      product = 1.0;
    }
  }

  if constexpr (Shared) {
    std::fill(grad_h, grad_h + dim, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double* u = model.output.row(rows[r]).data();
      for (std::size_t k = 0; k < dim; ++k) grad_h[k] += coefs[r] * load<Shared>(u[k]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      double* u = model.output.row(rows[r]).data();
      const double step = lr * coefs[r];
      for (std::size_t k = 0; k < dim; ++k) sub<Shared>(u[k], step * h[k]);
      sub<Shared>(model.output_bias[rows[r]], step);
    }
  } else {
    gather_scatter(model.output.data.data(), model.output_bias.data(), scratch.unique.data(), coefs,
                   scratch.unique.size(), dim, h, lr, grad_h);
  }

  for (const WordId id : inputs) {
    double* row = model.input.row(id).data();
    for (std::size_t k = 0; k < dim; ++k) sub<Shared>(row[k], lr * grad_h[k] * inv);
  }
  return linear + std::log(product);
}

// The single-threaded step.
double serial_step(Model& model, std::span<const WordId> inputs, WordId target, std::span<const WordId> negatives,
                   double lr, Scratch& scratch) {
  return example_step<false>(model, inputs, target, negatives, lr, scratch);
}

std::vector<std::uint64_t> corpus_counts(const EncodedCorpus& corpus, std::size_t vocab_size) {
  std::vector<std::uint64_t> counts(vocab_size, 0);
  for (const auto& sentence : corpus) {
    for (const WordId id : sentence) {
      if (id >= vocab_size) {
        throw CorruptStreamError("word id " + std::to_string(id) + " outside vocabulary of size " +
                                 std::to_string(vocab_size));
      }
      ++counts[id];
    }
  }
  return counts;
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "cbow") return Mode::kCbow;
  if (name == "skipgram" || name == "skip-gram") return Mode::kSkipGram;
  throw ConfigError("unknown word2vec mode: " + std::string(name));
}

std::string_view mode_name(Mode mode) { return mode == Mode::kCbow ? "cbow" : "skipgram"; }

void Config::validate() const {
  if (batch_size == 0 || embedding_size == 0 || skip_window == 0 || negatives == 0 || threads == 0) {
    throw ConfigError("word2vec sizes and counts must be positive");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

Model Model::initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  Model m{Matrix(vocab_size, dim), Matrix(vocab_size, dim), std::vector<double>(vocab_size, 0.0)};
  Rng rng(seed);
  const double scale = 0.5 / static_cast<double>(dim);
  for (double& v : m.input.data) v = uniform(rng, -scale, scale);
  return m;
}

CenterIndex::CenterIndex(const EncodedCorpus& corpus, std::size_t skip_window) : window_(skip_window) {
  if (skip_window == 0) throw ConfigError("skip window must be at least 1");
  for (const auto& sentence : corpus) {
    const std::size_t start = tokens_.size();
    tokens_.insert(tokens_.end(), sentence.begin(), sentence.end());
    if (sentence.size() <= 2 * skip_window) continue;
    for (std::size_t t = skip_window; t + skip_window < sentence.size(); ++t) centers_.push_back(start + t);
  }
  if (centers_.empty()) {
    throw InsufficientDataError("no sentence is longer than 2 * skip_window = " + std::to_string(2 * skip_window));
  }
}

WordId CenterIndex::context(std::size_t n, std::size_t slot) const {
  const std::size_t pos = centers_[n];
  return slot < window_ ? tokens_[pos - window_ + slot] : tokens_[pos + (slot - window_) + 1];
}

CbowBatch generate_cbow_batch(const CenterIndex& index, std::size_t batch_size, std::uint64_t cursor) {
  CbowBatch batch;
  batch.width = 2 * index.skip_window();
  batch.contexts.reserve(batch_size * batch.width);
  batch.targets.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t n = (cursor + b) % index.size();
    for (std::size_t slot = 0; slot < batch.width; ++slot) batch.contexts.push_back(index.context(n, slot));
    batch.targets.push_back(index.center(n));
  }
  batch.cursor = (cursor + batch_size) % index.size();
  return batch;
}

CbowBatch generate_cbow_batch(std::span<const WordId> ids, std::size_t skip_window, std::size_t batch_size,
                              std::uint64_t cursor) {
  const CenterIndex index(EncodedCorpus{std::vector<WordId>(ids.begin(), ids.end())}, skip_window);
  return generate_cbow_batch(index, batch_size, cursor);
}

SkipGramBatch generate_skipgram_pairs(const CenterIndex& index, std::size_t batch_size, std::uint64_t cursor) {
  const std::size_t width = 2 * index.skip_window();
  const std::uint64_t total = index.size() * width;
  SkipGramBatch batch;
  batch.centers.reserve(batch_size);
  batch.contexts.reserve(batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::uint64_t p = (cursor + b) % total;
    batch.centers.push_back(index.center(p / width));
    batch.contexts.push_back(index.context(p / width, p % width));
  }
  batch.cursor = (cursor + batch_size) % total;
  return batch;
}

SkipGramBatch generate_skipgram_pairs(std::span<const WordId> ids, std::size_t skip_window, std::size_t batch_size,
                                      std::uint64_t cursor) {
  const CenterIndex index(EncodedCorpus{std::vector<WordId>(ids.begin(), ids.end())}, skip_window);
  return generate_skipgram_pairs(index, batch_size, cursor);
}

std::vector<double> hidden_state(const Model& model, std::span<const WordId> inputs) {
  std::vector<double> h(model.dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(inputs.size());
  for (const WordId id : inputs) {
    const auto row = model.input.row(id);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += row[k] * inv;
  }
  return h;
}

double nce_forward(const Model& model, std::span<const double> hidden, WordId target,
                   std::span<const WordId> negatives) {
  double loss = softplus(-score(model, hidden, target));
  for (const WordId n : negatives) loss += softplus(score(model, hidden, n));
  return loss;
}

NceGradients nce_gradients(const Model& model, std::span<const WordId> inputs, WordId target,
                           std::span<const WordId> negatives) {
  const std::size_t dim = model.dim();
  const auto h = hidden_state(model, inputs);
  NceGradients out;
  out.loss = nce_forward(model, h, target, negatives);
  std::vector<double> grad_h(dim, 0.0);
  auto visit = [&](WordId id, double label) {
    const double coef = logistic(score(model, h, id), label).coef;
    const auto u = model.output.row(id);
    auto& gu = out.output[id];
    gu.resize(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      grad_h[k] += coef * u[k];
      gu[k] += coef * h[k];
    }
    out.output_bias[id] += coef;
  };
  visit(target, 1.0);
  for (const WordId n : negatives) visit(n, 0.0);
  const double inv = 1.0 / static_cast<double>(inputs.size());
  for (const WordId id : inputs) {
    auto& gi = out.input[id];
    gi.resize(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) gi[k] += grad_h[k] * inv;
  }
  return out;
}

double sgd_step(Model& model, std::span<const WordId> inputs, WordId target, std::span<const WordId> negatives,
                double lr) {
  Scratch scratch;
  return serial_step(model, inputs, target, negatives, lr, scratch);
}

UnigramSampler::UnigramSampler(std::span<const std::uint64_t> counts, double power) {
  const std::size_t n = counts.size();
  if (n == 0 || n > (std::size_t{1} << 32)) throw InsufficientDataError("noise distribution needs 1..2^32 words");
  std::vector<double> mass(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = counts[i] > 0 ? std::pow(static_cast<double>(counts[i]), power) : 0.0;
    total += mass[i];
  }
  if (!(total > 0.0)) throw InsufficientDataError("noise distribution has no mass");

  std::vector<double> accept(n, 1.0);
  alias_.resize(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] *= static_cast<double>(n) / total;
    alias_[i] = static_cast<WordId>(i);
    (mass[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t lo = small.back();
    const std::size_t hi = large.back();
    small.pop_back();
    accept[lo] = mass[lo];
    alias_[lo] = static_cast<WordId>(hi);
    mass[hi] -= 1.0 - mass[lo];
    if (mass[hi] < 1.0) {
      large.pop_back();
      small.push_back(hi);
    }
  }
  // Leftovers differ from 1 only by rounding.
  for (const std::size_t i : small) accept[i] = 1.0;

  accept_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    accept_[i] = accept[i] >= 1.0 ? kFullSlot : static_cast<std::uint64_t>(std::ldexp(accept[i], 32));
  }
  // A zero-mass slot is never kept.
  const auto heaviest = static_cast<WordId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] > 0) continue;
    accept_[i] = 0;
    if (alias_[i] == i) alias_[i] = heaviest;
  }
}

// Multiply-shift picks the slot from 32 random bits; the low half of the same
// product is uniform within the slot and serves as the alias coin.
inline WordId UnigramSampler::pick(std::uint32_t bits) const {
  const std::uint64_t scaled = static_cast<std::uint64_t>(bits) * accept_.size();
  const auto slot = static_cast<std::size_t>(scaled >> 32);
  const std::uint64_t coin = scaled & 0xFFFFFFFFu;
  const auto own = static_cast<WordId>(slot);
  const WordId other = alias_[slot];
  return coin < accept_[slot] ? own : other;
}

WordId UnigramSampler::sample(Rng& rng) const { return pick(static_cast<std::uint32_t>(rng() >> 32)); }

void UnigramSampler::sample_negatives(Rng& rng, WordId target, std::size_t count, std::vector<WordId>& out) const {
  // Each 64-bit draw feeds two picks, high half first. Draws that hit the
  // target are then replaced in order, each from a fresh single pick.
  out.resize(count);
  std::size_t n = 0;
  for (; n + 2 <= count; n += 2) {
    const std::uint64_t word = rng();
    out[n] = pick(static_cast<std::uint32_t>(word >> 32));
    out[n + 1] = pick(static_cast<std::uint32_t>(word));
  }
  if (n < count) out[n] = sample(rng);
  for (auto& id : out) {
    for (std::size_t attempt = 0; id == target && attempt < kMaxRedraws; ++attempt) id = sample(rng);
  }
}

namespace {

struct Runner {
  const Config& config;
  const CenterIndex& index;
  const UnigramSampler& sampler;
  Model& model;
  std::size_t steps;
  std::vector<double>& batch_losses;

  template <bool Shared>
  double step_one(std::span<const WordId> inputs, WordId target, double lr, Scratch& scratch) {
    if constexpr (Shared) {
      return example_step<true>(model, inputs, target, scratch.negatives, lr, scratch);
    } else {
      return serial_step(model, inputs, target, scratch.negatives, lr, scratch);
    }
  }

  template <bool Shared>
  void run_step(std::size_t step, Rng& rng, Scratch& scratch) {
    const std::size_t batch_size = config.batch_size;
    const double progress = static_cast<double>(step) / static_cast<double>(steps);
    const double lr = config.learning_rate * (1.0 - 0.9 * progress) / static_cast<double>(batch_size);
    const std::uint64_t cursor = static_cast<std::uint64_t>(step) * batch_size;
    double total = 0.0;
    if (config.mode == Mode::kCbow) {
      const auto batch = generate_cbow_batch(index, batch_size, cursor % index.size());
      for (std::size_t b = 0; b < batch_size; ++b) {
        sampler.sample_negatives(rng, batch.targets[b], config.negatives, scratch.negatives);
        const double loss = step_one<Shared>(batch.context(b), batch.targets[b], lr, scratch);
        if (!std::isfinite(loss)) throw TrainingDivergedError(step, b, "word2vec training diverged");
        total += loss;
      }
    } else {
      const std::uint64_t pairs = index.size() * 2 * index.skip_window();
      const auto batch = generate_skipgram_pairs(index, batch_size, cursor % pairs);
      for (std::size_t b = 0; b < batch_size; ++b) {
        sampler.sample_negatives(rng, batch.contexts[b], config.negatives, scratch.negatives);
        const WordId center = batch.centers[b];
        const double loss = step_one<Shared>(std::span<const WordId>(&center, 1), batch.contexts[b], lr, scratch);
        if (!std::isfinite(loss)) throw TrainingDivergedError(step, b, "word2vec training diverged");
        total += loss;
      }
    }
    batch_losses[step] = total / static_cast<double>(batch_size);
  }
};

}  // namespace

TrainResult train(const EncodedCorpus& corpus, std::size_t vocab_size, const Config& config,
                  const std::function<void(const StepReport&)>& on_report, std::size_t report_every) {
  config.validate();
  report_every = std::max<std::size_t>(1, report_every);
  const auto counts = corpus_counts(corpus, vocab_size);
  const CenterIndex index(corpus, config.skip_window);
  const UnigramSampler sampler(counts);

  std::size_t steps = config.num_steps;
  if (config.num_epochs > 0) {
    const std::size_t per_epoch =
        config.mode == Mode::kCbow ? index.size() : index.size() * 2 * config.skip_window;
    steps = (config.num_epochs * per_epoch + config.batch_size - 1) / config.batch_size;
  }

  TrainResult result{Model::initialize(vocab_size, config.embedding_size, config.seed), {}, 0.0, steps};
  if (steps == 0) return result;

  std::vector<double> batch_losses(steps, 0.0);
  Runner runner{config, index, sampler, result.model, steps, batch_losses};
  const std::uint64_t stream_seed = config.seed ^ 0xD1B54A32D192ED03ULL;

  double smoothed = 0.0;
  auto emit = [&](std::size_t step) {
    smoothed = step == 0 ? batch_losses[0] : kSmoothing * smoothed + (1.0 - kSmoothing) * batch_losses[step];
    if ((step + 1) % report_every == 0 || step + 1 == steps) {
      result.history.push_back({step + 1, smoothed});
      if (on_report) on_report(result.history.back());
    }
  };

  const std::size_t threads = std::min(config.threads, steps);
  if (threads <= 1) {
    Rng rng(stream_seed);
    Scratch scratch;
    for (std::size_t step = 0; step < steps; ++step) {
      runner.run_step<false>(step, rng, scratch);
      emit(step);
    }
  } else {
    std::vector<std::exception_ptr> failures(threads);
    std::atomic<bool> stop{false};
    {
      std::vector<std::jthread> workers;
      for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
          Rng rng(stream_seed + 0x9E3779B97F4A7C15ULL * (t + 1));
          Scratch scratch;
          try {
            for (std::size_t step = t; step < steps && !stop.load(std::memory_order_relaxed); step += threads) {
              runner.run_step<true>(step, rng, scratch);
            }
          } catch (...) {
            failures[t] = std::current_exception();
            stop = true;
          }
        });
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
    for (std::size_t step = 0; step < steps; ++step) emit(step);
  }
  result.final_loss = smoothed;
  return result;
}

Matrix final_vectors(const Model& model) { return model.input; }

}  // namespace farsivec::word2vec
