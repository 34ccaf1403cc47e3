#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "farsivec/cooccurrence.hpp"
#include "farsivec/corpus_ingest.hpp"
#include "farsivec/embedding_io.hpp"
#include "farsivec/error.hpp"
#include "farsivec/glove.hpp"
#include "farsivec/normalize.hpp"
#include "farsivec/pipeline.hpp"
#include "farsivec/query.hpp"
#include "farsivec/vocabulary.hpp"
#include "farsivec/word2vec.hpp"

namespace py = pybind11;
using namespace farsivec;

namespace {

using Sentences = std::vector<std::vector<std::string>>;

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), out.mutable_data());
  return out;
}

Matrix from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("vectors must be a 2-D array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

NormalizationConfig config_from(const std::optional<std::filesystem::path>& rules) {
  return rules ? load_normalization_config(*rules) : NormalizationConfig{};
}

EmbeddingSet make_embeddings(const std::vector<std::string>& words,
                             const py::array_t<double, py::array::c_style | py::array::forcecast>& vectors) {
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(words.size());
  for (const auto& w : words) entries.push_back({w, 0});
  EmbeddingSet e{Vocabulary(std::move(entries)), from_array(vectors)};
  e.validate();
  return e;
}

std::vector<std::string> words_of(const Vocabulary& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v.entries()) out.push_back(e.word);
  return out;
}

struct Prepared {
  Vocabulary vocab;
  EncodedCorpus corpus;
};

Prepared prepare(const Sentences& sentences, std::uint64_t min_occurrences) {
  const TokenStream stream{sentences};
  Vocabulary vocab = build_vocabulary(stream, min_occurrences);
  EncodedCorpus corpus = encode_stream(vocab, stream);
  return {std::move(vocab), std::move(corpus)};
}

}  // namespace

PYBIND11_MODULE(_farsivec, m) {
  m.doc() = "Persian text normalization and word-embedding training";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NotInVocabularyError>(m, "NotInVocabularyError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
  py::register_exception<InconsistentFilesError>(m, "InconsistentFilesError", base.ptr());
  py::register_exception<TrainingDivergedError>(m, "TrainingDivergedError", base.ptr());

  // Ingestion and normalization.
  m.def(
      "parse_lbl",
      [](std::string_view text) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& line : parse_lbl(text)) out.emplace_back(std::move(line.surface), std::move(line.tag));
        return out;
      },
      py::arg("text"), "Tagged lines as (surface, tag) pairs.");
  m.def(
      "strip_tags",
      [](std::string_view text) { return strip_tags(parse_lbl(text)); }, py::arg("text"),
      "Surfaces of a tagged file joined by single spaces.");
  m.def(
      "extract_html_text",
      [](std::string body, std::string source_id) { return extract_html_text(RawDocument{std::move(source_id), std::move(body)}); },
      py::arg("body"), py::arg("source_id") = "<memory>");
  m.def(
      "fix_pseudo_space",
      [](std::string_view text) { return fix_pseudo_space(text, AffixRuleSet::persian_defaults()); }, py::arg("text"));
  m.def(
      "separate_marks", [](std::string_view text) { return separate_marks(text, MarkSet::persian_defaults()); },
      py::arg("text"));
  m.def("split_sentences", &split_sentences, py::arg("text"));
  m.def("tokenize", &tokenize, py::arg("sentence"));
  m.def(
      "normalize",
      [](std::string_view text, const std::optional<std::filesystem::path>& rules) {
        const auto config = config_from(rules);
        return normalize_pipeline(text, config.rules, config.marks).sentences;
      },
      py::arg("text"), py::arg("rules") = py::none(), "Normalized text as a list of token lists.");

  // Vocabulary.
  py::class_<Vocabulary>(m, "Vocabulary")
      .def_property_readonly("words", &words_of)
      .def("__len__", &Vocabulary::size)
      .def("__contains__", &Vocabulary::contains)
      .def("lookup_id", &Vocabulary::lookup_id, py::arg("word"))
      .def("lookup_word", &Vocabulary::lookup_word, py::arg("id"))
      .def("count", &Vocabulary::count, py::arg("id"));
  m.def(
      "build_vocabulary", [](const Sentences& s, std::uint64_t min_occ) { return build_vocabulary(TokenStream{s}, min_occ); },
      py::arg("sentences"), py::arg("min_occurrences") = 1);
  m.def(
      "encode", [](const Vocabulary& v, const Sentences& s) { return encode_stream(v, TokenStream{s}); },
      py::arg("vocabulary"), py::arg("sentences"));

  // Co-occurrence and trainers.
  m.def(
      "cooccurrence",
      [](const EncodedCorpus& corpus, std::size_t vocab_size, std::size_t context_size, bool flat) {
        std::vector<std::tuple<WordId, WordId, double>> out;
        const auto matrix =
            accumulate(corpus, vocab_size, context_size, flat ? WindowWeighting::kFlat : WindowWeighting::kHarmonic);
        for (const auto& e : matrix.entries()) out.emplace_back(e.i, e.j, e.x);
        return out;
      },
      py::arg("corpus"), py::arg("vocab_size"), py::arg("context_size") = 5, py::arg("flat") = false,
      "Sorted (i, j, x) entries.");
  m.def("glove_weight", &glove::weight, py::arg("x"), py::arg("x_max") = 100.0, py::arg("alpha") = 0.75);

  py::class_<EmbeddingSet>(m, "Embeddings")
      .def(py::init(&make_embeddings), py::arg("words"), py::arg("vectors"))
      .def_property_readonly("words", [](const EmbeddingSet& e) { return words_of(e.vocab); })
      .def_property_readonly("vocabulary", [](const EmbeddingSet& e) { return e.vocab; })
      .def_property_readonly("vectors", [](const EmbeddingSet& e) { return to_array(e.vectors); })
      .def(
          "nearest",
          [](const EmbeddingSet& e, std::string_view word, std::size_t k) {
            std::vector<std::pair<std::string, double>> out;
            for (auto& n : nearest(e, word, k)) out.emplace_back(std::move(n.word), n.score);
            return out;
          },
          py::arg("word"), py::arg("k") = 10)
      .def("save", &write_embedding_files, py::arg("vocab_path"), py::arg("vectors_path"))
      .def_static("load", &read_embedding_files, py::arg("vocab_path"), py::arg("vectors_path"));

  m.def(
      "train_glove",
      [](const Sentences& sentences, std::size_t embedding_size, std::size_t num_epochs, std::size_t context_size,
         double x_max, double alpha, double learning_rate, std::uint64_t min_occurrences, std::uint64_t seed,
         std::size_t threads, bool main_only) {
        glove::Config config;
        config.embedding_size = embedding_size;
        config.num_epochs = num_epochs;
        config.context_size = context_size;
        config.x_max = x_max;
        config.alpha = alpha;
        config.learning_rate = learning_rate;
        config.min_occurrences = min_occurrences;
        config.seed = seed;
        config.threads = threads;
        config.validate();
        auto data = prepare(sentences, min_occurrences);
        py::gil_scoped_release release;
        const auto matrix = accumulate(data.corpus, data.vocab.size(), context_size);
        auto result = glove::train(matrix, config);
        EmbeddingSet e{std::move(data.vocab), glove::final_vectors(result.model, main_only)};
        return std::make_pair(std::move(e), std::move(result.epoch_costs));
      },
      py::arg("sentences"), py::arg("embedding_size") = 128, py::arg("num_epochs") = 20, py::arg("context_size") = 5,
      py::arg("x_max") = 100.0, py::arg("alpha") = 0.75, py::arg("learning_rate") = 0.05,
      py::arg("min_occurrences") = 1, py::arg("seed") = 1, py::arg("threads") = 1, py::arg("main_only") = false,
      "Returns (Embeddings, per-epoch costs starting with the initial cost).");

  m.def(
      "train_word2vec",
      [](const Sentences& sentences, const std::string& mode, std::size_t embedding_size, std::size_t num_steps,
         std::size_t batch_size, std::size_t skip_window, std::size_t negatives, double learning_rate,
         std::uint64_t min_occurrences, std::uint64_t seed, std::size_t threads) {
        word2vec::Config config;
        config.mode = word2vec::parse_mode(mode);
        config.embedding_size = embedding_size;
        config.num_steps = num_steps;
        config.batch_size = batch_size;
        config.skip_window = skip_window;
        config.negatives = negatives;
        config.learning_rate = learning_rate;
        config.seed = seed;
        config.threads = threads;
        config.validate();
        auto data = prepare(sentences, min_occurrences);
        py::gil_scoped_release release;
        auto result = word2vec::train(data.corpus, data.vocab.size(), config);
        std::vector<std::pair<std::size_t, double>> history;
        for (const auto& r : result.history) history.emplace_back(r.step, r.loss);
        EmbeddingSet e{std::move(data.vocab), word2vec::final_vectors(result.model)};
        return std::make_pair(std::move(e), std::move(history));
      },
      py::arg("sentences"), py::arg("mode") = "cbow", py::arg("embedding_size") = 128, py::arg("num_steps") = 100000,
      py::arg("batch_size") = 128, py::arg("skip_window") = 1, py::arg("negatives") = 64,
      py::arg("learning_rate") = 1.0, py::arg("min_occurrences") = 1, py::arg("seed") = 1, py::arg("threads") = 1,
      "Returns (Embeddings, [(step, smoothed loss)]).");

  m.def("cosine", [](const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw py::value_error("vectors differ in length");
    return cosine(u, v);
  });

  m.def(
      "run_train",
      [](const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out_dir,
         const std::string& trainer, std::optional<std::string> format, std::optional<std::filesystem::path> rules,
         std::uint64_t seed, std::size_t threads, std::size_t embedding_size, std::optional<std::size_t> num_epochs,
         std::optional<std::size_t> num_steps, bool use_cache) {
        TrainManifest manifest;
        manifest.inputs = inputs;
        manifest.out_dir = out_dir;
        manifest.trainer = parse_trainer(trainer);
        if (format) manifest.format = parse_format(*format);
        manifest.rules_path = std::move(rules);
        manifest.seed = seed;
        manifest.threads = threads;
        manifest.glove.embedding_size = embedding_size;
        manifest.word2vec.embedding_size = embedding_size;
        if (num_epochs) manifest.glove.num_epochs = *num_epochs;
        if (num_steps) manifest.word2vec.num_steps = *num_steps;
        manifest.use_cache = use_cache;
        TrainSummary s;
        {
          py::gil_scoped_release release;
          s = run_train(manifest);
        }
        py::dict out;
        out["vocab_path"] = s.vocab_path;
        out["vectors_path"] = s.vectors_path;
        out["vocab_size"] = s.vocab_size;
        out["token_count"] = s.token_count;
        out["final_loss"] = s.final_loss;
        out["elapsed_seconds"] = s.elapsed_seconds;
        return out;
      },
      py::arg("inputs"), py::arg("out_dir"), py::arg("trainer") = "glove", py::arg("format") = py::none(),
      py::arg("rules") = py::none(), py::arg("seed") = 1, py::arg("threads") = 1, py::arg("embedding_size") = 128,
      py::arg("num_epochs") = py::none(), py::arg("num_steps") = py::none(), py::arg("use_cache") = true,
      "The full ingest-to-files pipeline; returns a summary dict.");
}
