#pragma once

#include <string>
#include <vector>

#include "c2v/diag.hpp"

namespace c2v {

enum class TokKind { Keyword, Identifier, Constant, Punctuator, String, End };

struct Token
{
  TokKind kind = TokKind::End;
  std::string lexeme;
  SourceLoc loc;
  bool bol = false;          // first token on its line
  bool space_before = false; // whitespace precedes it in the source
  bool from_macro = false;   // produced by a macro expansion (loc = invocation site)
  unsigned depth = 0;        // macro expansion depth
};

const char* to_string(TokKind k);

struct PreprocessOptions
{
  std::vector<std::string> include_dirs;
  std::vector<std::string> defines; // NAME or NAME=VALUE
};

// Splits text into raw tokens (no directive handling, no keyword
// classification). Throws E_PP_SYNTAX on malformed input.
std::vector<Token> lex(const std::string& text, const std::string& filename);

bool is_keyword(const std::string& word);

// Expands macros, resolves #include against the including file's
// directory, the include directories and the bundled headers, and honors
// the #ifdef family. Identifiers that are keywords come out as keywords;
// C2V_SAMPLE_INPUT / C2V_DRIVE_OUTPUT come out as keyword markers.
// The result ends with a single End token.
std::vector<Token> preprocess(const std::string& source, const std::string& filename,
                              const PreprocessOptions& opts);
std::vector<Token> preprocess_file(const std::string& path, const PreprocessOptions& opts);

// Contents of a bundled header (<stdint.h>, <SoftFloat.h>, ...), or nullptr.
const std::string* bundled_header(const std::string& name);

// C-lite source of the soft-float routines used to lower float arithmetic.
const std::string& softfloat_prelude();
inline constexpr const char* prelude_filename = "<c2v-prelude>";

std::string read_file(const std::string& path);

// Text of line `loc.line` of a file seen by the preprocessor (or readable
// from disk), without surrounding whitespace; empty if unknown.
std::string source_line(const SourceLoc& loc);

} // namespace c2v
