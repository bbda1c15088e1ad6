#pragma once

#include <stdexcept>
#include <string>

namespace c2v {

struct SourceLoc
{
  std::string file;
  unsigned line = 0;
  unsigned col = 0;

  bool valid() const { return line != 0; }
  std::string str() const;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

// Every failure the pipeline reports carries a stable code (E_SYNTAX,
// E_TYPE, ...) and, where it exists, the source position it refers to.
class Error : public std::runtime_error
{
public:
  Error(std::string code, std::string message, SourceLoc loc = {});

  const std::string& code() const { return code_; }
  const std::string& message() const { return message_; }
  const SourceLoc& loc() const { return loc_; }

  // `file:line:col: CODE: message`, or `CODE: message` without a location.
  std::string format() const;

private:
  std::string code_;
  std::string message_;
  SourceLoc loc_;
};

[[noreturn]] void fail(std::string code, std::string message, SourceLoc loc = {});

// Internal invariant violations; these are bugs, not user errors.
[[noreturn]] void internal_error(const std::string& what);

} // namespace c2v
