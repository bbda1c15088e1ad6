#include "c2v/diag.hpp"

namespace c2v {

std::string SourceLoc::str() const
{
  return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

static std::string render(const std::string& code, const std::string& message,
                          const SourceLoc& loc)
{
  if (loc.valid())
    return loc.str() + ": " + code + ": " + message;
  return code + ": " + message;
}

Error::Error(std::string code, std::string message, SourceLoc loc)
  : std::runtime_error(render(code, message, loc))
  , code_{std::move(code)}
  , message_{std::move(message)}
  , loc_{std::move(loc)}
{}

std::string Error::format() const
{
  return what();
}

void fail(std::string code, std::string message, SourceLoc loc)
{
  throw Error(std::move(code), std::move(message), std::move(loc));
}

void internal_error(const std::string& what)
{
  throw Error("E_INTERNAL", what);
}

} // namespace c2v
