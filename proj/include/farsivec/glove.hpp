#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "farsivec/cooccurrence.hpp"
#include "farsivec/dense.hpp"

namespace farsivec::glove {

struct Config {
  std::size_t batch_size = 64;
  std::size_t embedding_size = 128;
  std::size_t context_size = 5;
  std::uint64_t min_occurrences = 1;
  double x_max = 100.0;  // co-occurrence cap
  double learning_rate = 0.05;
  double alpha = 0.75;  // weighting exponent
  std::size_t num_epochs = 20;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  /// Throws ConfigError unless every field is positive and 0 < alpha <= 1.
  void validate() const;
};

/// Main and context vectors with their biases.
struct Model {
  Matrix main;
  Matrix context;
  std::vector<double> main_bias;
  std::vector<double> context_bias;

  /// Vectors uniform in (-0.5/D, 0.5/D), biases zero.
  static Model initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

  std::size_t vocab_size() const noexcept { return main.rows; }
  std::size_t dim() const noexcept { return main.cols; }
  bool operator==(const Model&) const = default;
};

struct PairGradients {
  std::vector<double> main;     // d/d main[i]
  std::vector<double> context;  // d/d context[j]
  double main_bias = 0.0;
  double context_bias = 0.0;
};

/// f(x) = (x / x_max)^alpha below the cap, 1 at or above it.
double weight(double x, double x_max, double alpha);

/// f(x_ij) * (main[i] . context[j] + b_i + b~_j - ln x_ij)^2
double pair_cost(const Model& model, WordId i, WordId j, double x_ij, const Config& config);

PairGradients pair_gradients(const Model& model, WordId i, WordId j, double x_ij, const Config& config);

/// Sum of pair_cost over every stored entry.
double objective(const Model& model, const CooccurrenceMatrix& matrix, const Config& config);

struct EpochReport {
  std::size_t epoch = 0;
  std::size_t batches = 0;
  double cost = 0.0;
};

struct TrainResult {
  Model model;
  /// Objective before training followed by the objective after each epoch.
  std::vector<double> epoch_costs;
};

/// AdaGrad over shuffled entries, one update per entry; the per-parameter
/// squared-gradient accumulators start at 1. Throws InsufficientDataError for
/// an empty matrix and TrainingDivergedError on a non-finite residual.
TrainResult train(const CooccurrenceMatrix& matrix, const Config& config,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

/// main + context row-wise, or main alone.
Matrix final_vectors(const Model& model, bool main_only = false);

}  // namespace farsivec::glove
