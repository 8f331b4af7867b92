#ifndef PROPSUM_ERRORS_H_
#define PROPSUM_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace propsum {

// Three families, mirrored by the CLI exit codes: configuration problems (2),
// bad or inconsistent input data (3), and failures inside a pluggable
// backend (4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class MissingFile : public DataError {
 public:
  explicit MissingFile(const std::string& path)
      : DataError("missing file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class SchemaViolation : public DataError {
 public:
  SchemaViolation(std::size_t line, const std::string& field,
                  const std::string& detail)
      : DataError("schema violation at line " + std::to_string(line) +
                  ", field '" + field + "': " + detail),
        line_(line),
        field_(field) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class DuplicateId : public DataError {
 public:
  explicit DuplicateId(const std::string& id)
      : DataError("duplicate id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class UnknownDocument : public DataError {
 public:
  explicit UnknownDocument(const std::string& doc_id)
      : DataError("unknown document: " + doc_id) {}
};

class IndexOutOfRange : public DataError {
 public:
  using DataError::DataError;
};

class InvalidSpans : public DataError {
 public:
  using DataError::DataError;
};

class EmptyReferences : public DataError {
 public:
  EmptyReferences() : DataError("no reference summaries given") {}
};

class NoPropositions : public DataError {
 public:
  NoPropositions() : DataError("no propositions to label") {}
};

class NoUnits : public DataError {
 public:
  NoUnits() : DataError("no units to select from") {}
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class BackendFailure : public BackendError {
 public:
  using BackendError::BackendError;
};

// Wraps a pipeline stage failure with the stage name and topic.
class StageError : public Error {
 public:
  enum class Kind { kConfig, kData, kBackend, kOther };

  StageError(Kind kind, const std::string& stage, const std::string& topic_id,
             const std::string& what)
      : Error("stage '" + stage + "' failed for topic '" + topic_id +
              "': " + what),
        kind_(kind),
        stage_(stage),
        topic_id_(topic_id) {}

  Kind kind() const { return kind_; }
  const std::string& stage() const { return stage_; }
  const std::string& topic_id() const { return topic_id_; }

 private:
  Kind kind_;
  std::string stage_;
  std::string topic_id_;
};

}  // namespace propsum

#endif  // PROPSUM_ERRORS_H_
