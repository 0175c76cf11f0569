#pragma once

#include <stdexcept>
#include <string>

namespace hoikit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries the line number or byte offset.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its documented domain (k > n, target < count, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hoikit
