#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ubar {

// Base for every error raised by the toolkit. The CLI maps subclasses onto
// exit codes, so keep the hierarchy shallow.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data could not be read or violates the canonical schema.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& where, const std::string& what)
      : DataError(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class UnknownActType : public DataError {
 public:
  explicit UnknownActType(const std::string& act)
      : DataError("unknown act type '" + act + "'"), act_(act) {}
  const std::string& act() const { return act_; }

 private:
  std::string act_;
};

class UnknownDomain : public DataError {
 public:
  explicit UnknownDomain(const std::string& domain)
      : DataError("unknown domain '" + domain + "'"), domain_(domain) {}
  const std::string& domain() const { return domain_; }

 private:
  std::string domain_;
};

// Strict span parsing failed at `index` within the token sequence.
class MalformedSpan : public DataError {
 public:
  MalformedSpan(std::size_t index, const std::string& what)
      : DataError("malformed span at token " + std::to_string(index) + ": " + what),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

// Requested configuration is invalid (bad policy/setting combination, missing
// ground truth for an oracle policy, etc.).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Decoder transport or protocol failure.
class DecoderError : public Error {
 public:
  using Error::Error;
};

}  // namespace ubar
