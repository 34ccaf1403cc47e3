#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace farsivec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line of an input or output file could not be parsed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class ExtractionError : public Error {
 public:
  ExtractionError(std::string source_id, const std::string& what)
      : Error(source_id + ": " + what), source_id_(std::move(source_id)) {}

  const std::string& source_id() const noexcept { return source_id_; }

 private:
  std::string source_id_;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CorruptStreamError : public Error {
 public:
  using Error::Error;
};

class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class InconsistentFilesError : public Error {
 public:
  using Error::Error;
};

class NotInVocabularyError : public Error {
 public:
  explicit NotInVocabularyError(const std::string& word)
      : Error("word not in vocabulary: " + word), word_(word) {}

  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

/// Training produced a non-finite loss.
class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(std::size_t epoch, std::size_t entry, const std::string& what)
      : Error(what + " (epoch " + std::to_string(epoch) + ", entry " + std::to_string(entry) + ")"),
        epoch_(epoch),
        entry_(entry) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t entry() const noexcept { return entry_; }

 private:
  std::size_t epoch_;
  std::size_t entry_;
};

}  // namespace farsivec
