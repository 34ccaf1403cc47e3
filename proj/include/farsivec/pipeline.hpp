#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "farsivec/error.hpp"
#include "farsivec/glove.hpp"
#include "farsivec/normalize.hpp"
#include "farsivec/word2vec.hpp"

namespace farsivec {

enum class CorpusFormat { kLbl, kHtml, kPlain };

CorpusFormat parse_format(std::string_view name);
std::string_view format_name(CorpusFormat format);
/// By extension: .lbl, .html/.htm, anything else is plain text.
CorpusFormat detect_format(const std::filesystem::path& path);

/// A failure inside one pipeline stage. `user_error` separates bad
/// arguments from I/O and parse failures.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, bool user_error)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)), user_error_(user_error) {}

  const std::string& stage() const noexcept { return stage_; }
  bool user_error() const noexcept { return user_error_; }

 private:
  std::string stage_;
  bool user_error_;
};

struct FileStats {
  std::filesystem::path path;
  std::size_t lines = 0;
  std::size_t tokens = 0;
};

struct IngestResult {
  std::string text;
  std::vector<FileStats> files;
};

/// Converts every input (files, or directories walked in filename order) to
/// plain text and merges them. Without an explicit format each file's format
/// is detected, and inputs of different formats are rejected.
IngestResult ingest(const std::vector<std::filesystem::path>& inputs, std::optional<CorpusFormat> format,
                    const HtmlOptions& html = {});

enum class Trainer { kGlove, kCbow, kSkipGram };

Trainer parse_trainer(std::string_view name);
std::string_view trainer_name(Trainer trainer);

struct TrainManifest {
  std::vector<std::filesystem::path> inputs;
  std::optional<CorpusFormat> format;
  std::optional<std::filesystem::path> rules_path;
  std::filesystem::path out_dir;
  Trainer trainer = Trainer::kGlove;
  glove::Config glove;
  word2vec::Config word2vec;
  std::uint64_t min_occurrences = 1;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool flat_window = false;
  bool main_only = false;
  bool use_cache = true;
  std::optional<std::filesystem::path> loss_csv;
  std::size_t report_every = 1000;

  /// Throws StageError (user error) on an invalid manifest.
  void validate() const;
};

struct TrainSummary {
  std::filesystem::path vocab_path;
  std::filesystem::path vectors_path;
  std::size_t vocab_size = 0;
  std::size_t token_count = 0;
  double final_loss = 0.0;
  double elapsed_seconds = 0.0;
};

/// ingest -> normalize -> vocabulary -> (co-occurrence -> GloVe | word2vec) ->
/// vocab.txt + vectors.txt in out_dir. Stage caches live in out_dir/cache.
/// Progress lines go to `log` when provided.
TrainSummary run_train(const TrainManifest& manifest, const std::function<void(const std::string&)>& log = {});

/// 64-bit FNV-1a, used for cache file names.
std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace farsivec
