#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vsched {

struct SourceLoc {
  uint32_t line = 0;
  uint32_t col = 0;

  bool valid() const { return line != 0; }
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

// Base for every diagnostic the engine raises. `what()` carries only the
// message; `format()` prefixes the file and position the way compilers do.
class Error : public std::runtime_error {
 public:
  Error(std::string message, SourceLoc loc = {})
      : std::runtime_error(std::move(message)), loc_(loc) {}

  const SourceLoc& loc() const { return loc_; }

  std::string format(const std::string& file) const {
    std::string out = file;
    if (loc_.valid()) out += ":" + loc_.str();
    out += ": ";
    out += kind();
    out += what();
    return out;
  }

 protected:
  virtual const char* kind() const { return "error: "; }

 private:
  SourceLoc loc_;
};

class SyntaxError : public Error {
 public:
  using Error::Error;
};

// Input outside the supported subset. Never silently pruned.
class UnsupportedError : public Error {
 public:
  UnsupportedError(const std::string& construct, SourceLoc loc)
      : Error("unsupported construct '" + construct + "'", loc) {}
};

class ElabError : public Error {
 public:
  using Error::Error;
};

// Misuse of the kernel API (choice not enabled, scheduling into the past).
class KernelError : public Error {
 public:
  using Error::Error;
};

struct Warning {
  SourceLoc loc;
  std::string message;

  std::string format(const std::string& file) const {
    std::string out = file;
    if (loc.valid()) out += ":" + loc.str();
    return out + ": warning: " + message;
  }

  bool operator==(const Warning&) const = default;
};

}  // namespace vsched
