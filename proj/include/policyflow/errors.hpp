#pragma once

#include <stdexcept>
#include <string>

namespace policyflow {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Input HTML cannot be tokenized at all (empty or unreadable byte stream).
class MalformedHtml : public Error {
 public:
  using Error::Error;
};

// Segmentation produced nothing after boilerplate removal.
class EmptyDocument : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// A JSON payload does not match the schema the caller requires.
class SchemaViolation : public Error {
 public:
  using Error::Error;
};

// A typology kind outside the four supported ones.
class UnknownKind : public Error {
 public:
  using Error::Error;
};

class ProviderUnavailable : public Error {
 public:
  using Error::Error;
};

class EmptyIndex : public Error {
 public:
  using Error::Error;
};

// Backend gave up after the retry budget or answered with a fatal status.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Mock backend has no fixture and no manifest rule for a request.
class MockMiss : public Error {
 public:
  using Error::Error;
};

// Model output could not be parsed into the expected shape.
class ParseFailure : public Error {
 public:
  using Error::Error;
};

// Model output parsed but the label is not in the agent's vocabulary.
class LabelOutOfVocabulary : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// Report files with incompatible schema versions.
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace policyflow
