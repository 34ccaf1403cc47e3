// farsivec: Persian corpus ingestion, embedding training and neighbour queries.
//
//   farsivec ingest --format lbl -o corpus.txt bijankhan/
//   farsivec train --trainer glove --out-dir out corpus.txt
//   farsivec query --vocab out/vocab.txt --vectors out/vectors.txt --word کتاب -k 10

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "farsivec/embedding_io.hpp"
#include "farsivec/pipeline.hpp"
#include "farsivec/query.hpp"

namespace fs = std::filesystem;
using namespace farsivec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct IngestArgs {
  std::vector<std::string> inputs;
  std::optional<std::string> format;
  std::optional<std::string> rules;
  std::string out;
};

struct TrainArgs {
  std::vector<std::string> inputs;
  std::optional<std::string> format;
  std::optional<std::string> rules;
  std::string out_dir;
  std::string trainer = "glove";
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::uint64_t min_occurrences = 1;

  std::optional<std::size_t> batch_size;
  std::size_t embedding_size = 128;
  std::optional<double> learning_rate;
  std::optional<std::size_t> num_epochs;

  std::size_t context_size = 5;
  double x_max = 100.0;
  double alpha = 0.75;
  bool flat_window = false;
  bool main_only = false;

  std::size_t skip_window = 1;
  std::size_t num_steps = 100000;
  std::size_t negatives = 64;

  bool no_cache = false;
  std::optional<std::string> loss_csv;
  std::size_t report_every = 1000;
};

struct QueryArgs {
  std::string vocab;
  std::string vectors;
  std::string word;
  std::size_t k = 10;
};

std::vector<fs::path> to_paths(const std::vector<std::string>& items) { return {items.begin(), items.end()}; }

int run_ingest(const IngestArgs& args) {
  const std::optional<CorpusFormat> format = args.format ? std::optional(parse_format(*args.format)) : std::nullopt;
  const NormalizationConfig config = args.rules ? load_normalization_config(*args.rules) : NormalizationConfig{};
  const IngestResult result = ingest(to_paths(args.inputs), format, config.html);
  if (result.files.empty()) std::cerr << "warning: no input files found\n";
  for (const auto& f : result.files) {
    std::cerr << f.path.string() << ": " << f.lines << " lines, " << f.tokens << " tokens\n";
  }
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw Error("cannot open " + args.out + " for writing");
  out << result.text;
  if (!result.text.empty()) out << '\n';
  if (!out) throw Error("failed to write " + args.out);
  return kExitOk;
}

int run_train(const TrainArgs& args) {
  TrainManifest m;
  m.inputs = to_paths(args.inputs);
  if (args.format) m.format = parse_format(*args.format);
  if (args.rules) m.rules_path = *args.rules;
  m.out_dir = args.out_dir;
  m.trainer = parse_trainer(args.trainer);
  m.seed = args.seed;
  m.threads = args.threads;
  m.min_occurrences = args.min_occurrences;
  m.flat_window = args.flat_window;
  m.main_only = args.main_only;
  m.use_cache = !args.no_cache;
  if (args.loss_csv) m.loss_csv = *args.loss_csv;
  m.report_every = args.report_every;

  m.glove.embedding_size = args.embedding_size;
  m.glove.context_size = args.context_size;
  m.glove.x_max = args.x_max;
  m.glove.alpha = args.alpha;
  if (args.batch_size) m.glove.batch_size = *args.batch_size;
  if (args.learning_rate) m.glove.learning_rate = *args.learning_rate;
  if (args.num_epochs) m.glove.num_epochs = *args.num_epochs;

  m.word2vec.embedding_size = args.embedding_size;
  m.word2vec.skip_window = args.skip_window;
  m.word2vec.num_steps = args.num_steps;
  m.word2vec.negatives = args.negatives;
  if (args.batch_size) m.word2vec.batch_size = *args.batch_size;
  if (args.learning_rate) m.word2vec.learning_rate = *args.learning_rate;
  if (args.num_epochs) m.word2vec.num_epochs = *args.num_epochs;

  const TrainSummary summary = farsivec::run_train(m, [](const std::string& line) { std::cerr << line << '\n'; });
  std::printf("vocabulary: %s (%zu entries)\n", summary.vocab_path.string().c_str(), summary.vocab_size);
  std::printf("vectors: %s\n", summary.vectors_path.string().c_str());
  std::printf("final loss: %.6f\n", summary.final_loss);
  std::printf("elapsed: %.3f s\n", summary.elapsed_seconds);
  return kExitOk;
}

int run_query(const QueryArgs& args) {
  const EmbeddingSet embeddings = read_embedding_files(args.vocab, args.vectors);
  for (const auto& n : nearest(embeddings, args.word, args.k)) std::printf("%s\t%.6f\n", n.word.c_str(), n.score);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persian word embeddings: corpus ingestion, GloVe / CBOW / skip-gram training, neighbour queries"};
  app.require_subcommand(1);
  const std::vector<std::string> formats = {"lbl", "html", "plain"};

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert tagged, HTML or plain corpora into one plain-text file");
  ingest_cmd->add_option("inputs", ingest_args.inputs, "Input files or directories")->required();
  ingest_cmd->add_option("--format", ingest_args.format, "Input format (detected from the extension if omitted)")
      ->check(CLI::IsMember(formats));
  ingest_cmd->add_option("--rules", ingest_args.rules, "Rules file ([boilerplate] section is used here)");
  ingest_cmd->add_option("-o,--out", ingest_args.out, "Output text file")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Normalize a corpus and train word vectors");
  train_cmd->add_option("inputs", train_args.inputs, "Input files or directories")->required();
  train_cmd->add_option("--format", train_args.format, "Input format")->check(CLI::IsMember(formats));
  train_cmd->add_option("--rules", train_args.rules, "Affix / mark / boilerplate rules file");
  train_cmd->add_option("--out-dir", train_args.out_dir, "Directory for vocab.txt and vectors.txt")->required();
  train_cmd->add_option("--trainer", train_args.trainer, "glove, cbow or skipgram")
      ->check(CLI::IsMember({"glove", "cbow", "skipgram"}))
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--threads", train_args.threads, "Worker threads; 1 is bit-deterministic")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--min-occurrences", train_args.min_occurrences, "Lowest count kept in the vocabulary")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--batch-size", train_args.batch_size, "Batch size [glove: 64, word2vec: 128]");
  train_cmd->add_option("--embedding-size", train_args.embedding_size, "Vector dimension")->capture_default_str();
  train_cmd->add_option("--learning-rate", train_args.learning_rate, "Learning rate [glove: 0.05, word2vec: 1.0]");
  train_cmd->add_option("--num-epochs", train_args.num_epochs,
                        "Passes over the data [glove: 20; word2vec: overrides --num-steps when set]");
  train_cmd->add_option("--context-size", train_args.context_size, "GloVe window on each side")->capture_default_str();
  train_cmd->add_option("--x-max", train_args.x_max, "GloVe co-occurrence cap")->capture_default_str();
  train_cmd->add_option("--alpha", train_args.alpha, "GloVe weighting exponent")->capture_default_str();
  train_cmd->add_flag("--flat-window", train_args.flat_window, "Count window pairs as 1 instead of 1/distance");
  train_cmd->add_flag("--main-only", train_args.main_only, "Emit GloVe main vectors instead of main + context");
  train_cmd->add_option("--skip-window", train_args.skip_window, "word2vec window on each side")->capture_default_str();
  train_cmd->add_option("--num-steps", train_args.num_steps, "word2vec batches")->capture_default_str();
  train_cmd->add_option("--negatives", train_args.negatives, "Negative samples per example")->capture_default_str();
  train_cmd->add_flag("--no-cache", train_args.no_cache, "Do not read or write stage caches");
  train_cmd->add_option("--loss-csv", train_args.loss_csv, "Write step,loss rows to this file");
  train_cmd->add_option("--report-every", train_args.report_every, "word2vec steps between progress lines")
      ->capture_default_str();

  QueryArgs query_args;
  auto* query_cmd = app.add_subcommand("query", "Print the nearest neighbours of a word");
  query_cmd->add_option("--vocab", query_args.vocab, "Vocabulary file")->required();
  query_cmd->add_option("--vectors", query_args.vectors, "Vector file")->required();
  query_cmd->add_option("--word", query_args.word, "Query word")->required();
  query_cmd->add_option("-k", query_args.k, "Number of neighbours")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest_args);
    if (*train_cmd) return run_train(train_args);
    if (*query_cmd) return run_query(query_args);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.user_error() ? kExitUsage : kExitFailure;
  } catch (const NotInVocabularyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
