#ifndef EMOSHOT_ERROR_HPP
#define EMOSHOT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emoshot {

/// Broad error families. The CLI maps them onto exit codes.
enum class ErrorKind {
  Parse,         // malformed record in an input file
  Format,        // structurally invalid file (header, arity, dimension)
  Bounds,        // request exceeds available data
  Completeness,  // a required label/key is missing
  Shape,         // vector dimensions disagree
  Domain,        // mathematically undefined input (zero vector)
  Alignment,     // two collections that must line up do not
  Config,        // invalid run configuration
  Training,      // optimizer failure
  Io,            // file cannot be opened or written
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Bounds: return "bounds error";
    case ErrorKind::Completeness: return "completeness error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Alignment: return "alignment error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Training: return "training error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error tied to a location in an input file. line is 1-based.
class FileError : public Error {
 public:
  FileError(ErrorKind kind, const std::string& file, std::size_t line, const std::string& message)
      : Error(kind, file + ":" + std::to_string(line) + ": " + message), file_(file), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace emoshot

#endif  // EMOSHOT_ERROR_HPP
