#include "farsivec/glove.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "farsivec/error.hpp"
#include "farsivec/random.hpp"

namespace farsivec::glove {
namespace {

template <bool Shared>
double load(const double& x) {
  if constexpr (Shared) {
    return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool Shared>
void store(double& x, double v) {
  if constexpr (Shared) {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  } else {
    x = v;
  }
}

struct AdaGradState {
  Matrix main_sq;
  Matrix context_sq;
  std::vector<double> main_bias_sq;
  std::vector<double> context_bias_sq;

  AdaGradState(std::size_t vocab, std::size_t dim)
      : main_sq(vocab, dim, 1.0), context_sq(vocab, dim, 1.0), main_bias_sq(vocab, 1.0), context_bias_sq(vocab, 1.0) {}
};

template <bool Shared>
void adagrad_step(double& param, double& accum, double grad, double lr) {
  const double g2 = load<Shared>(accum) + grad * grad;
  store<Shared>(accum, g2);
  store<Shared>(param, load<Shared>(param) - lr * grad / std::sqrt(g2));
}

// Returns the weighted squared residual before the update.
template <bool Shared>
double update_entry(Model& model, AdaGradState& state, const CooccurrenceEntry& e, const Config& config) {
  const std::size_t dim = model.dim();
  double* w = model.main.row(e.i).data();
  double* c = model.context.row(e.j).data();
  double* w_sq = state.main_sq.row(e.i).data();
  double* c_sq = state.context_sq.row(e.j).data();

  double r = load<Shared>(model.main_bias[e.i]) + load<Shared>(model.context_bias[e.j]) - std::log(e.x);
  for (std::size_t k = 0; k < dim; ++k) r += load<Shared>(w[k]) * load<Shared>(c[k]);
  if (!std::isfinite(r)) return r;

  const double f = weight(e.x, config.x_max, config.alpha);
  const double g = 2.0 * f * r;
  const double lr = config.learning_rate;
  for (std::size_t k = 0; k < dim; ++k) {
    const double wk = load<Shared>(w[k]);
    const double ck = load<Shared>(c[k]);
    adagrad_step<Shared>(w[k], w_sq[k], g * ck, lr);
    adagrad_step<Shared>(c[k], c_sq[k], g * wk, lr);
  }
  adagrad_step<Shared>(model.main_bias[e.i], state.main_bias_sq[e.i], g, lr);
  adagrad_step<Shared>(model.context_bias[e.j], state.context_bias_sq[e.j], g, lr);
  return f * r * r;
}

template <bool Shared>
void run_range(Model& model, AdaGradState& state, const std::vector<CooccurrenceEntry>& entries,
               const std::vector<std::size_t>& order, std::size_t begin, std::size_t end, const Config& config,
               std::size_t epoch) {
  for (std::size_t n = begin; n < end; ++n) {
    const double cost = update_entry<Shared>(model, state, entries[order[n]], config);
    if (!std::isfinite(cost)) throw TrainingDivergedError(epoch, order[n], "GloVe training diverged");
  }
}

}  // namespace

void Config::validate() const {
  if (batch_size == 0 || embedding_size == 0 || context_size == 0 || min_occurrences == 0 || num_epochs == 0 ||
      threads == 0) {
    throw ConfigError("GloVe sizes and counts must be positive");
  }
  if (!(x_max > 0.0) || !(learning_rate > 0.0)) throw ConfigError("x_max and learning rate must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
}

Model Model::initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
  Model m{Matrix(vocab_size, dim), Matrix(vocab_size, dim), std::vector<double>(vocab_size, 0.0),
          std::vector<double>(vocab_size, 0.0)};
  Rng rng(seed);
  const double scale = 0.5 / static_cast<double>(dim);
  for (double& v : m.main.data) v = uniform(rng, -scale, scale);
  for (double& v : m.context.data) v = uniform(rng, -scale, scale);
  return m;
}

double weight(double x, double x_max, double alpha) { return x < x_max ? std::pow(x / x_max, alpha) : 1.0; }

double pair_cost(const Model& model, WordId i, WordId j, double x_ij, const Config& config) {
  const double r = dot(model.main.row(i), model.context.row(j)) + model.main_bias[i] + model.context_bias[j] -
                   std::log(x_ij);
  return weight(x_ij, config.x_max, config.alpha) * r * r;
}

PairGradients pair_gradients(const Model& model, WordId i, WordId j, double x_ij, const Config& config) {
  const double r = dot(model.main.row(i), model.context.row(j)) + model.main_bias[i] + model.context_bias[j] -
                   std::log(x_ij);
  const double g = 2.0 * weight(x_ij, config.x_max, config.alpha) * r;
  PairGradients out;
  const auto w = model.main.row(i);
  const auto c = model.context.row(j);
  out.main.resize(w.size());
  out.context.resize(c.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    out.main[k] = g * c[k];
    out.context[k] = g * w[k];
  }
  out.main_bias = g;
  out.context_bias = g;
  return out;
}

double objective(const Model& model, const CooccurrenceMatrix& matrix, const Config& config) {
  double total = 0.0;
  for (const auto& e : matrix.entries()) total += pair_cost(model, e.i, e.j, e.x, config);
  return total;
}

TrainResult train(const CooccurrenceMatrix& matrix, const Config& config,
                  const std::function<void(const EpochReport&)>& on_epoch) {
  config.validate();
  if (matrix.empty()) throw InsufficientDataError("co-occurrence matrix is empty");

  const auto entries = matrix.entries();
  TrainResult result{Model::initialize(matrix.vocab_size(), config.embedding_size, config.seed), {}};
  Model& model = result.model;
  AdaGradState state(matrix.vocab_size(), config.embedding_size);
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);

  std::vector<std::size_t> order(entries.size());
  for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;

  result.epoch_costs.push_back(objective(model, matrix, config));
  const std::size_t batches = (entries.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t threads = std::min(config.threads, entries.size());

  for (std::size_t epoch = 1; epoch <= config.num_epochs; ++epoch) {
    shuffle(order, rng);
    if (threads <= 1) {
      run_range<false>(model, state, entries, order, 0, order.size(), config, epoch);
    } else {
      std::vector<std::exception_ptr> failures(threads);
      {
        std::vector<std::jthread> workers;
        const std::size_t per = (order.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
          workers.emplace_back([&, t] {
            try {
              const std::size_t begin = std::min(order.size(), t * per);
              run_range<true>(model, state, entries, order, begin, std::min(order.size(), begin + per), config,
                              epoch);
            } catch (...) {
              failures[t] = std::current_exception();
            }
          });
        }
      }
      for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    }
    const double cost = objective(model, matrix, config);
    if (!std::isfinite(cost)) throw TrainingDivergedError(epoch, entries.size(), "GloVe objective is not finite");
    result.epoch_costs.push_back(cost);
    if (on_epoch) on_epoch({epoch, batches, cost});
  }
  return result;
}

Matrix final_vectors(const Model& model, bool main_only) {
  Matrix out = model.main;
  if (!main_only) {
    for (std::size_t n = 0; n < out.data.size(); ++n) out.data[n] += model.context.data[n];
  }
  return out;
}

}  // namespace farsivec::glove
