#pragma once

#include <stdexcept>
#include <string>

namespace scmkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown node or variable name.
class UnknownName : public Error {
 public:
  explicit UnknownName(const std::string& name)
      : Error("unknown name " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotSolvable : public Error {
 public:
  NotSolvable(const std::string& what, std::string witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

class NotUniquelySolvable : public Error {
 public:
  NotUniquelySolvable(const std::string& what, std::string witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

// A configured enumeration bound was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class DslError : public Error {
 public:
  DslError(const std::string& message, int line, int col)
      : Error(message + " at " + std::to_string(line) + ":" + std::to_string(col)),
        message_(message),
        line_(line),
        col_(col) {}
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string message_;
  int line_;
  int col_;
};

}  // namespace scmkit
