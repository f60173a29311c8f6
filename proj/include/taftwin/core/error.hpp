#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taftwin {

// Base of every error the kernel throws. Subclasses carry the structured
// context (offsets, ids) that callers need to report or recover.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class MalformedMessage : public Error {
 public:
  MalformedMessage(std::size_t line, std::size_t position, const std::string& what)
      : Error("malformed message (line " + std::to_string(line) + ", position " +
              std::to_string(position) + "): " + what),
        line_(line),
        position_(position) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t line_;
  std::size_t position_;
};

}  // namespace taftwin
