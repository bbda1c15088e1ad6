#include "c2v/preprocess.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

namespace c2v {

namespace fs = std::filesystem;

namespace {

std::mutex sources_mutex;
std::map<std::string, std::vector<std::string>> sources;

std::vector<std::string> split_lines(const std::string& text)
{
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    lines.push_back(line);
  return lines;
}

void remember_source(const std::string& filename, const std::string& text)
{
  std::lock_guard<std::mutex> lock(sources_mutex);
  sources[filename] = split_lines(text);
}

} // namespace

const char* to_string(TokKind k)
{
  switch (k) {
  case TokKind::Keyword: return "keyword";
  case TokKind::Identifier: return "identifier";
  case TokKind::Constant: return "constant";
  case TokKind::Punctuator: return "punctuator";
  case TokKind::String: return "string";
  case TokKind::End: return "end of input";
  }
  return "?";
}

bool is_keyword(const std::string& w)
{
  static const std::set<std::string> keywords = {
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double",
    "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long",
    "register", "restrict", "return", "short", "signed", "sizeof", "static", "struct",
    "switch", "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool",
    "assert", "C2V_SAMPLE_INPUT", "C2V_DRIVE_OUTPUT",
  };
  return keywords.count(w) != 0;
}

static bool is_interface_marker(const std::string& w)
{
  return w == "C2V_SAMPLE_INPUT" || w == "C2V_DRIVE_OUTPUT";
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail("E_IO", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Token> lex(const std::string& text, const std::string& filename)
{
  static const char* const puncts[] = {
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "*=", "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##", "#", "[", "]", "(", ")", "{", "}",
    ".", "&", "*", "+", "-", "~", "!", "/", "%", "<", ">", "^", "|", "?", ":", ";", "=", ",",
  };

  std::vector<Token> out;
  size_t i = 0, n = text.size();
  unsigned line = 1, col = 1;
  bool bol = true, space = false;

  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < n; j++, i++) {
      if (text[i] == '\n') {
        line++;
        col = 1;
      } else {
        col++;
      }
    }
  };

  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      advance(1);
      bol = true;
      space = false;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      advance(1);
      space = true;
      continue;
    }
    if (c == '\\' && i + 1 < n && (text[i + 1] == '\n' || text[i + 1] == '\r')) {
      advance(text[i + 1] == '\r' && i + 2 < n && text[i + 2] == '\n' ? 3 : 2);
      space = true;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n')
        advance(1);
      space = true;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      SourceLoc start{filename, line, col};
      advance(2);
      while (i < n && !(text[i] == '*' && i + 1 < n && text[i + 1] == '/'))
        advance(1);
      if (i >= n)
        fail("E_PP_SYNTAX", "unterminated comment", start);
      advance(2);
      space = true;
      continue;
    }

    Token t;
    t.loc = {filename, line, col};
    t.bol = bol;
    t.space_before = space;
    bol = false;
    space = false;
    size_t start = i;

    auto is_ident_start = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
    };
    auto is_ident_char = [&](char ch) { return is_ident_start(ch) || (ch >= '0' && ch <= '9'); };

    if (is_ident_start(c)) {
      while (i < n && is_ident_char(text[i]))
        advance(1);
      t.kind = TokKind::Identifier;
    } else if ((c >= '0' && c <= '9') || (c == '.' && i + 1 < n && text[i + 1] >= '0'
                                           && text[i + 1] <= '9')) {
      // pp-number
      advance(1);
      while (i < n) {
        char d = text[i];
        if ((d == '+' || d == '-') && (text[i - 1] == 'e' || text[i - 1] == 'E'
                                       || text[i - 1] == 'p' || text[i - 1] == 'P')) {
          advance(1);
          continue;
        }
        if (is_ident_char(d) || d == '.') {
          advance(1);
          continue;
        }
        break;
      }
      t.kind = TokKind::Constant;
    } else if (c == '\'' || c == '"') {
      char quote = c;
      advance(1);
      while (i < n && text[i] != quote) {
        if (text[i] == '\n')
          fail("E_PP_SYNTAX", "unterminated literal", t.loc);
        if (text[i] == '\\')
          advance(1);
        advance(1);
      }
      if (i >= n)
        fail("E_PP_SYNTAX", "unterminated literal", t.loc);
      advance(1);
      t.kind = quote == '"' ? TokKind::String : TokKind::Constant;
    } else {
      const char* match = nullptr;
      for (const char* p : puncts) {
        size_t len = std::char_traits<char>::length(p);
        if (text.compare(i, len, p) == 0) {
          match = p;
          break;
        }
      }
      if (!match)
        fail("E_PP_SYNTAX", std::string("unexpected character '") + c + "'", t.loc);
      advance(std::char_traits<char>::length(match));
      t.kind = TokKind::Punctuator;
    }
    t.lexeme = text.substr(start, i - start);
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

struct Macro
{
  bool function_like = false;
  std::vector<std::string> params;
  std::vector<Token> body;
};

class Preprocessor
{
public:
  explicit Preprocessor(const PreprocessOptions& opts) : opts_{opts}
  {
    for (const auto& d : opts.defines) {
      auto eq = d.find('=');
      std::string name = d.substr(0, eq);
      std::string value = eq == std::string::npos ? "1" : d.substr(eq + 1);
      Macro m;
      m.body = lex(value, "<command line>");
      for (auto& t : m.body)
        t.bol = false;
      if (name.empty() || is_interface_marker(name))
        fail("E_PP_SYNTAX", "invalid macro definition '" + d + "'");
      macros_[name] = std::move(m);
    }
  }

  void run(const std::string& text, const std::string& filename, const std::string& dir)
  {
    process(text, filename, dir, 0);
    Token end;
    end.kind = TokKind::End;
    end.loc = {filename, last_line_, 1};
    out_.push_back(end);
  }

  std::vector<Token> take() { return std::move(out_); }

private:
  struct Frame
  {
    const std::vector<Token>* toks;
    size_t pos;
  };

  void process(const std::string& text, const std::string& filename, const std::string& dir,
               unsigned include_depth)
  {
    remember_source(filename, text);
    std::vector<Token> toks = lex(text, filename);
    size_t pos = 0;
    std::deque<Token> pending;
    struct Cond { bool active; bool seen_else; bool parent_active; SourceLoc loc; };
    std::vector<Cond> conds;
    auto active = [&] { return conds.empty() || conds.back().active; };

    auto directive_at = [&](size_t p) {
      return p < toks.size() && toks[p].bol && toks[p].kind == TokKind::Punctuator
          && toks[p].lexeme == "#";
    };
    auto peek = [&]() -> const Token* {
      if (!pending.empty())
        return &pending.front();
      if (pos < toks.size() && !directive_at(pos) && active())
        return &toks[pos];
      return nullptr;
    };
    auto next = [&]() -> Token {
      if (!pending.empty()) {
        Token t = std::move(pending.front());
        pending.pop_front();
        return t;
      }
      return toks[pos++];
    };

    while (true) {
      if (pending.empty()) {
        if (pos >= toks.size())
          break;
        if (directive_at(pos)) {
          size_t end = pos + 1;
          while (end < toks.size() && !toks[end].bol)
            end++;
          std::vector<Token> line(toks.begin() + pos + 1, toks.begin() + end);
          SourceLoc hash_loc = toks[pos].loc;
          pos = end;
          directive(line, hash_loc, conds, active(), dir, include_depth);
          continue;
        }
        if (!active()) {
          pos++;
          continue;
        }
      }
      Token t = next();
      last_line_ = t.loc.line;
      if (t.kind == TokKind::Identifier) {
        auto it = macros_.find(t.lexeme);
        if (it != macros_.end()) {
          const Macro& m = it->second;
          if (t.depth >= 64)
            fail("E_MACRO_RECURSION", "expansion of '" + t.lexeme + "' exceeds depth 64", t.loc);
          if (!m.function_like) {
            auto exp = instantiate(m, {}, t);
            pending.insert(pending.begin(), exp.begin(), exp.end());
            continue;
          }
          const Token* p = peek();
          if (p && p->kind == TokKind::Punctuator && p->lexeme == "(") {
            next();
            std::vector<std::vector<Token>> args(1);
            int level = 0;
            while (true) {
              if (!peek())
                fail("E_PP_SYNTAX", "unterminated invocation of macro '" + t.lexeme + "'", t.loc);
              Token a = next();
              if (a.kind == TokKind::Punctuator) {
                if (a.lexeme == "(")
                  level++;
                else if (a.lexeme == ")") {
                  if (level == 0)
                    break;
                  level--;
                } else if (a.lexeme == "," && level == 0) {
                  args.emplace_back();
                  continue;
                }
              }
              args.back().push_back(std::move(a));
            }
            if (m.params.empty() && args.size() == 1 && args[0].empty())
              args.clear();
            if (args.size() != m.params.size())
              fail("E_PP_SYNTAX", "macro '" + t.lexeme + "' expects "
                                      + std::to_string(m.params.size()) + " arguments, got "
                                      + std::to_string(args.size()), t.loc);
            auto exp = instantiate(m, args, t);
            pending.insert(pending.begin(), exp.begin(), exp.end());
            continue;
          }
        }
      }
      finish(t);
    }
    if (!conds.empty())
      fail("E_PP_SYNTAX", "unterminated conditional directive", conds.back().loc);
  }

  std::vector<Token> instantiate(const Macro& m, const std::vector<std::vector<Token>>& args,
                                 const Token& site)
  {
    std::vector<Token> out;
    for (const Token& b : m.body) {
      if (b.kind == TokKind::Identifier) {
        auto it = std::find(m.params.begin(), m.params.end(), b.lexeme);
        if (it != m.params.end()) {
          bool first = true;
          for (Token a : args[it - m.params.begin()]) {
            a.depth = std::max(a.depth, site.depth + 1);
            if (first)
              a.space_before = b.space_before;
            first = false;
            out.push_back(std::move(a));
          }
          continue;
        }
      }
      Token t = b;
      t.loc = site.loc;
      t.from_macro = true;
      t.depth = site.depth + 1;
      t.bol = false;
      out.push_back(std::move(t));
    }
    if (!out.empty())
      out.front().space_before = site.space_before;
    return out;
  }

  void finish(Token t)
  {
    t.bol = false;
    if (t.kind == TokKind::Identifier && is_keyword(t.lexeme))
      t.kind = TokKind::Keyword;
    out_.push_back(std::move(t));
  }

  template <typename Conds>
  void directive(const std::vector<Token>& line, const SourceLoc& loc, Conds& conds, bool active,
                 const std::string& dir, unsigned include_depth)
  {
    if (line.empty())
      return;
    const std::string& name = line[0].lexeme;
    auto need_ident = [&](size_t idx) -> const std::string& {
      if (idx >= line.size() || line[idx].kind != TokKind::Identifier)
        fail("E_PP_SYNTAX", "#" + name + " expects an identifier", loc);
      return line[idx].lexeme;
    };

    if (name == "ifdef" || name == "ifndef") {
      bool parent = active;
      bool cond = false;
      if (parent) {
        const std::string& id = need_ident(1);
        cond = macros_.count(id) != 0 || is_interface_marker(id);
        if (name == "ifndef")
          cond = !cond;
      }
      conds.push_back({parent && cond, false, parent, loc});
      return;
    }
    if (name == "else") {
      if (conds.empty() || conds.back().seen_else)
        fail("E_PP_SYNTAX", "#else without matching #ifdef", loc);
      conds.back().seen_else = true;
      conds.back().active = conds.back().parent_active && !conds.back().active;
      return;
    }
    if (name == "endif") {
      if (conds.empty())
        fail("E_PP_SYNTAX", "#endif without matching #ifdef", loc);
      conds.pop_back();
      return;
    }
    if (name == "if" || name == "elif")
      fail("E_PP_SYNTAX", "#" + name + " is not supported (use #ifdef/#ifndef)", loc);
    if (!active)
      return;

    if (name == "define") {
      const std::string& id = need_ident(1);
      if (is_interface_marker(id) || id == "assert")
        fail("E_PP_SYNTAX", "'" + id + "' is an intrinsic and cannot be redefined", line[1].loc);
      Macro m;
      size_t body = 2;
      if (line.size() > 2 && line[2].lexeme == "(" && !line[2].space_before) {
        m.function_like = true;
        size_t k = 3;
        if (k < line.size() && line[k].lexeme == ")") {
          k++;
        } else {
          while (true) {
            if (k < line.size() && line[k].lexeme == "...")
              fail("E_PP_SYNTAX", "variadic macros are not supported", line[k].loc);
            if (k >= line.size() || line[k].kind != TokKind::Identifier)
              fail("E_PP_SYNTAX", "malformed macro parameter list", loc);
            m.params.push_back(line[k].lexeme);
            k++;
            if (k < line.size() && line[k].lexeme == ",") {
              k++;
              continue;
            }
            if (k < line.size() && line[k].lexeme == ")") {
              k++;
              break;
            }
            fail("E_PP_SYNTAX", "malformed macro parameter list", loc);
          }
        }
        body = k;
      }
      for (size_t k = body; k < line.size(); k++) {
        if (line[k].kind == TokKind::Punctuator && (line[k].lexeme == "#" || line[k].lexeme == "##"))
          fail("E_PP_SYNTAX", "stringizing and token pasting are not supported", line[k].loc);
        Token t = line[k];
        t.bol = false;
        m.body.push_back(std::move(t));
      }
      macros_[id] = std::move(m);
      return;
    }
    if (name == "undef") {
      const std::string& id = need_ident(1);
      if (is_interface_marker(id))
        fail("E_PP_SYNTAX", "'" + id + "' is an intrinsic and cannot be undefined", line[1].loc);
      macros_.erase(id);
      return;
    }
    if (name == "include") {
      if (include_depth > 64)
        fail("E_PP_SYNTAX", "#include nested too deeply", loc);
      std::string target;
      bool angled = false;
      if (line.size() == 2 && line[1].kind == TokKind::String) {
        target = line[1].lexeme.substr(1, line[1].lexeme.size() - 2);
      } else if (line.size() >= 3 && line[1].lexeme == "<" && line.back().lexeme == ">") {
        angled = true;
        for (size_t k = 2; k + 1 < line.size(); k++)
          target += line[k].lexeme;
      } else {
        fail("E_PP_SYNTAX", "malformed #include", loc);
      }
      include(target, angled, loc, dir, include_depth);
      return;
    }
    if (name == "pragma")
      fail("E_PP_SYNTAX", "#pragma is not supported", loc);
    if (name == "error")
      fail("E_PP_SYNTAX", "#error directive", loc);
    fail("E_PP_SYNTAX", "unknown directive #" + name, loc);
  }

  void include(const std::string& target, bool angled, const SourceLoc& loc,
               const std::string& dir, unsigned include_depth)
  {
    std::vector<std::string> candidates;
    if (!angled && !dir.empty())
      candidates.push_back((fs::path(dir) / target).string());
    for (const auto& d : opts_.include_dirs)
      candidates.push_back((fs::path(d) / target).string());
    for (const auto& c : candidates) {
      std::error_code ec;
      if (fs::is_regular_file(c, ec)) {
        std::string text = read_file(c);
        process(text, c, fs::path(c).parent_path().string(), include_depth + 1);
        return;
      }
    }
    if (const std::string* b = bundled_header(target)) {
      process(*b, "<" + target + ">", "", include_depth + 1);
      return;
    }
    fail("E_INCLUDE_NOT_FOUND", "cannot find include file '" + target + "' (included from "
                                    + loc.file + ":" + std::to_string(loc.line) + ")", loc);
  }

  const PreprocessOptions& opts_;
  std::map<std::string, Macro> macros_;
  std::vector<Token> out_;
  unsigned last_line_ = 1;
};

} // namespace

std::vector<Token> preprocess(const std::string& source, const std::string& filename,
                              const PreprocessOptions& opts)
{
  Preprocessor pp(opts);
  std::string dir;
  std::error_code ec;
  if (!filename.empty() && filename.front() != '<' && fs::exists(filename, ec))
    dir = fs::path(filename).parent_path().string();
  pp.run(source, filename, dir);
  return pp.take();
}

std::vector<Token> preprocess_file(const std::string& path, const PreprocessOptions& opts)
{
  return preprocess(read_file(path), path, opts);
}

} // namespace c2v

namespace c2v {

std::string source_line(const SourceLoc& loc)
{
  std::lock_guard<std::mutex> lock(sources_mutex);
  auto it = sources.find(loc.file);
  if (it == sources.end()) {
    std::error_code ec;
    if (loc.file.empty() || !fs::is_regular_file(loc.file, ec))
      return {};
    it = sources.emplace(loc.file, split_lines(read_file(loc.file))).first;
  }
  if (loc.line == 0 || loc.line > it->second.size())
    return {};
  const std::string& l = it->second[loc.line - 1];
  size_t b = l.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  size_t e = l.find_last_not_of(" \t\r");
  return l.substr(b, e - b + 1);
}

} // namespace c2v
