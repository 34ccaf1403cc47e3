#include "farsivec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "farsivec/cooccurrence.hpp"
#include "farsivec/corpus_ingest.hpp"
#include "farsivec/embedding_io.hpp"
#include "farsivec/utf8.hpp"
#include "farsivec/vocabulary.hpp"

namespace farsivec {
namespace fs = std::filesystem;

namespace {

bool is_user_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) != nullptr || dynamic_cast<const NotInVocabularyError*>(&e) != nullptr ||
         dynamic_cast<const InsufficientDataError*>(&e) != nullptr;
}

template <typename F>
auto run_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), is_user_error(e));
  }
}

std::size_t count_tokens(std::string_view text) {
  std::size_t n = 0;
  bool in_token = false;
  for (const char c : text) {
    const bool space = utf8::is_space(static_cast<unsigned char>(c));
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

std::string to_hex(std::uint64_t v) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(v));
  return buffer;
}

std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    auto found = list_corpus_files(input);
    files.insert(files.end(), found.begin(), found.end());
  }
  return files;
}

std::string convert_file(const fs::path& path, CorpusFormat format, const HtmlOptions& html, FileStats& stats) {
  const std::string raw = read_text_file(path);
  stats.lines = static_cast<std::size_t>(std::count(raw.begin(), raw.end(), '\n')) +
                ((!raw.empty() && raw.back() != '\n') ? 1 : 0);
  std::string text;
  switch (format) {
    case CorpusFormat::kLbl:
      try {
        const auto lines = parse_lbl(raw);
        text = strip_tags(lines);
      } catch (const ParseError& e) {
        throw StageError("ingest", path.string() + ":" + std::to_string(e.line()) + ": " + e.detail(), false);
      }
      break;
    case CorpusFormat::kHtml:
      text = extract_html_text(RawDocument{path.string(), raw}, html);
      break;
    case CorpusFormat::kPlain:
      if (!utf8::is_valid(raw)) throw EncodingError(path.string() + ": not valid UTF-8");
      text = raw;
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
      break;
  }
  stats.tokens = count_tokens(text);
  return text;
}

std::string config_fingerprint(const NormalizationConfig& config) {
  std::string out;
  for (const auto* set : {&config.rules.prefixes, &config.rules.suffixes, &config.marks.marks,
                          &config.html.boilerplate_prefixes, &config.html.skipped_elements}) {
    for (const auto& s : *set) {
      out += s;
      out.push_back('\x1f');
    }
    out.push_back('\x1e');
  }
  return out;
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write " + path.string());
}

}  // namespace

CorpusFormat parse_format(std::string_view name) {
  if (name == "lbl") return CorpusFormat::kLbl;
  if (name == "html") return CorpusFormat::kHtml;
  if (name == "plain") return CorpusFormat::kPlain;
  throw ConfigError("unknown corpus format: " + std::string(name));
}

std::string_view format_name(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kLbl:
      return "lbl";
    case CorpusFormat::kHtml:
      return "html";
    case CorpusFormat::kPlain:
      return "plain";
  }
  return "plain";
}

CorpusFormat detect_format(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".lbl") return CorpusFormat::kLbl;
  if (ext == ".html" || ext == ".htm") return CorpusFormat::kHtml;
  return CorpusFormat::kPlain;
}

Trainer parse_trainer(std::string_view name) {
  if (name == "glove") return Trainer::kGlove;
  if (name == "cbow") return Trainer::kCbow;
  if (name == "skipgram" || name == "skip-gram") return Trainer::kSkipGram;
  throw ConfigError("unknown trainer: " + std::string(name));
}

std::string_view trainer_name(Trainer trainer) {
  switch (trainer) {
    case Trainer::kGlove:
      return "glove";
    case Trainer::kCbow:
      return "cbow";
    case Trainer::kSkipGram:
      return "skipgram";
  }
  return "glove";
}

std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

IngestResult ingest(const std::vector<fs::path>& inputs, std::optional<CorpusFormat> format, const HtmlOptions& html) {
  return run_stage("ingest", [&] {
    if (inputs.empty()) throw ConfigError("no inputs given");
    const auto files = expand_inputs(inputs);
    if (!format && !files.empty()) {
      const CorpusFormat first = detect_format(files.front());
      for (const auto& f : files) {
        if (detect_format(f) != first) {
          throw ConfigError("mixed corpus formats in one invocation (" + files.front().string() + " is " +
                            std::string(format_name(first)) + ", " + f.string() + " is " +
                            std::string(format_name(detect_format(f))) + ")");
        }
      }
    }
    IngestResult result;
    std::vector<std::string> texts;
    for (const auto& f : files) {
      FileStats stats;
      stats.path = f;
      texts.push_back(convert_file(f, format ? *format : detect_format(f), html, stats));
      result.files.push_back(stats);
    }
    result.text = merge_corpora(texts);
    return result;
  });
}

void TrainManifest::validate() const {
  run_stage("manifest", [&] {
    if (inputs.empty()) throw ConfigError("at least one input is required");
    if (out_dir.empty()) throw ConfigError("an output directory is required");
    if (min_occurrences == 0) throw ConfigError("min occurrences must be at least 1");
    if (threads == 0) throw ConfigError("threads must be at least 1");
    if (trainer == Trainer::kGlove) {
      glove.validate();
    } else {
      word2vec.validate();
    }
  });
}

TrainSummary run_train(const TrainManifest& manifest, const std::function<void(const std::string&)>& log) {
  manifest.validate();
  const auto started = std::chrono::steady_clock::now();
  auto say = [&](const std::string& line) {
    if (log) log(line);
  };

  const NormalizationConfig norm = run_stage("rules", [&] {
    return manifest.rules_path ? load_normalization_config(*manifest.rules_path) : NormalizationConfig{};
  });
  const std::string norm_fingerprint = config_fingerprint(norm);

  run_stage("output", [&] { fs::create_directories(manifest.out_dir); });
  const fs::path cache_dir = manifest.out_dir / "cache";
  if (manifest.use_cache) run_stage("output", [&] { fs::create_directories(cache_dir); });

  // Raw input bytes plus every option that shapes the merged text.
  const std::uint64_t corpus_key = run_stage("ingest", [&] {
    std::uint64_t h = content_hash(manifest.format ? format_name(*manifest.format) : "auto");
    h = content_hash(norm_fingerprint, h);
    for (const auto& f : expand_inputs(manifest.inputs)) {
      h = content_hash(f.string(), h);
      h = content_hash(read_text_file(f), h);
    }
    return h;
  });

  std::string text;
  const fs::path corpus_cache = cache_dir / ("corpus-" + to_hex(corpus_key) + ".txt");
  if (manifest.use_cache && fs::exists(corpus_cache)) {
    text = run_stage("ingest", [&] { return read_text_file(corpus_cache); });
    say("ingest: reused " + corpus_cache.string());
  } else {
    auto ingested = ingest(manifest.inputs, manifest.format, norm.html);
    for (const auto& f : ingested.files) {
      say("ingest: " + f.path.string() + ": " + std::to_string(f.lines) + " lines, " + std::to_string(f.tokens) +
          " tokens");
    }
    text = std::move(ingested.text);
    if (manifest.use_cache) run_stage("ingest", [&] { write_file(corpus_cache, text); });
  }

  const TokenStream stream =
      run_stage("normalize", [&] { return normalize_pipeline(text, norm.rules, norm.marks); });
  const Vocabulary vocab = run_stage("vocabulary", [&] { return build_vocabulary(stream, manifest.min_occurrences); });
  const EncodedCorpus corpus = encode_stream(vocab, stream);
  say("vocabulary: " + std::to_string(vocab.size()) + " entries from " + std::to_string(stream.token_count()) +
      " tokens in " + std::to_string(stream.sentences.size()) + " sentences");

  std::vector<std::pair<std::size_t, double>> losses;
  Matrix vectors;
  double final_loss = 0.0;

  if (manifest.trainer == Trainer::kGlove) {
    glove::Config config = manifest.glove;
    config.seed = manifest.seed;
    config.threads = manifest.threads;
    config.min_occurrences = manifest.min_occurrences;

    std::ostringstream key;
    key << to_hex(corpus_key) << '|' << manifest.min_occurrences << '|' << config.context_size << '|'
        << manifest.flat_window << '|' << manifest.threads;
    const fs::path spill = cache_dir / ("cooc-" + to_hex(content_hash(key.str())) + ".bin");
    const CooccurrenceMatrix matrix = run_stage("cooccurrence", [&] {
      const auto weighting = manifest.flat_window ? WindowWeighting::kFlat : WindowWeighting::kHarmonic;
      if (manifest.use_cache && fs::exists(spill)) {
        std::ifstream in(spill, std::ios::binary);
        say("cooccurrence: reused " + spill.string());
        return read_spill(in, vocab.size());
      }
      auto m = accumulate_sharded(corpus, vocab.size(), config.context_size, manifest.threads, weighting);
      if (manifest.use_cache) {
        std::ofstream out(spill, std::ios::binary);
        write_spill(m, out);
      }
      return m;
    });
    say("cooccurrence: " + std::to_string(matrix.nnz()) + " nonzero entries");

    const auto result = run_stage("glove", [&] {
      return glove::train(matrix, config, [&](const glove::EpochReport& r) {
        say("glove: epoch " + std::to_string(r.epoch) + " (" + std::to_string(r.batches) + " batches) cost " +
            std::to_string(r.cost));
      });
    });
    for (std::size_t e = 0; e < result.epoch_costs.size(); ++e) losses.emplace_back(e, result.epoch_costs[e]);
    final_loss = result.epoch_costs.back();
    vectors = glove::final_vectors(result.model, manifest.main_only);
  } else {
    word2vec::Config config = manifest.word2vec;
    config.seed = manifest.seed;
    config.threads = manifest.threads;
    config.mode = manifest.trainer == Trainer::kCbow ? word2vec::Mode::kCbow : word2vec::Mode::kSkipGram;
    const auto result = run_stage(std::string(trainer_name(manifest.trainer)), [&] {
      return word2vec::train(
          corpus, vocab.size(), config,
          [&](const word2vec::StepReport& r) {
            say(std::string(trainer_name(manifest.trainer)) + ": step " + std::to_string(r.step) + " loss " +
                std::to_string(r.loss));
          },
          manifest.report_every);
    });
    for (const auto& r : result.history) losses.emplace_back(r.step, r.loss);
    final_loss = result.final_loss;
    vectors = word2vec::final_vectors(result.model);
  }

  TrainSummary summary;
  summary.vocab_path = manifest.out_dir / "vocab.txt";
  summary.vectors_path = manifest.out_dir / "vectors.txt";
  run_stage("output", [&] {
    write_embedding_files(EmbeddingSet{vocab, std::move(vectors)}, summary.vocab_path, summary.vectors_path);
    if (manifest.loss_csv) {
      std::ostringstream csv;
      csv << "step,loss\n";
      for (const auto& [step, loss] : losses) csv << step << ',' << format_component(loss) << '\n';
      write_file(*manifest.loss_csv, csv.str());
    }
  });
  summary.vocab_size = vocab.size();
  summary.token_count = stream.token_count();
  summary.final_loss = final_loss;
  summary.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

}  // namespace farsivec
