#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "probinc/error.hpp"
#include "probinc/knowledge_base.hpp"

namespace probinc {
namespace {

enum class Tok {
  kName,
  kNumber,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kBar,
  kOr,
  kAnd,
  kNot,
  kEq,
  kColon,
  kComma,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t column = 1;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const std::size_t col = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (is_name_start(c)) {
      std::size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      out.push_back({Tok::kName, std::string(line.substr(i, j - i)), col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < line.size() &&
             (is_name_char(line[j]) || line[j] == '.')) {
        ++j;
      }
      out.push_back({Tok::kNumber, std::string(line.substr(i, j - i)), col});
      i = j;
      continue;
    }
    auto two = [&](char next) {
      return i + 1 < line.size() && line[i + 1] == next;
    };
    switch (c) {
      case '(':
        out.push_back({Tok::kLParen, "(", col});
        break;
      case ')':
        out.push_back({Tok::kRParen, ")", col});
        break;
      case '[':
        out.push_back({Tok::kLBracket, "[", col});
        break;
      case ']':
        out.push_back({Tok::kRBracket, "]", col});
        break;
      case '|':
        if (two('|')) {
          out.push_back({Tok::kOr, "||", col});
          ++i;
        } else {
          out.push_back({Tok::kBar, "|", col});
        }
        break;
      case '&':
        if (!two('&')) throw ParseError("expected '&&'", line_no, col);
        out.push_back({Tok::kAnd, "&&", col});
        ++i;
        break;
      case '!':
        out.push_back({Tok::kNot, "!", col});
        break;
      case '=':
        out.push_back({Tok::kEq, "=", col});
        break;
      case ':':
        out.push_back({Tok::kColon, ":", col});
        break;
      case ',':
        out.push_back({Tok::kComma, ",", col});
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         line_no, col);
    }
    ++i;
  }
  out.push_back({Tok::kEnd, "", line.size() + 1});
  return out;
}

const char* describe(Tok t) {
  switch (t) {
    case Tok::kName:
      return "name";
    case Tok::kNumber:
      return "number";
    case Tok::kLParen:
      return "'('";
    case Tok::kRParen:
      return "')'";
    case Tok::kLBracket:
      return "'['";
    case Tok::kRBracket:
      return "']'";
    case Tok::kBar:
      return "'|'";
    case Tok::kOr:
      return "'||'";
    case Tok::kAnd:
      return "'&&'";
    case Tok::kNot:
      return "'!'";
    case Tok::kEq:
      return "'='";
    case Tok::kColon:
      return "':'";
    case Tok::kComma:
      return "','";
    case Tok::kEnd:
      return "end of line";
  }
  return "token";
}

bool reserved(const std::string& name) { return name == "var" || name == "top"; }

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line_no, Signature& sig,
             const ParseOptions& options)
      : toks_(std::move(tokens)), line_(line_no), sig_(sig), opts_(options) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok t) const { return peek().kind == t; }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  Token expect(Tok t) {
    if (!at(t)) {
      fail(std::string("expected ") + describe(t) + ", found " +
           describe(peek().kind));
    }
    return take();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, peek().column);
  }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t col) const {
    throw ParseError(msg, line_, col);
  }

  void declaration() {
    take();  // var
    const Token name = expect(Tok::kName);
    if (reserved(name.text)) fail_at("'" + name.text + "' is reserved", name.column);
    Variable v{name.text, {}};
    if (at(Tok::kColon)) {
      take();
      v.domain.push_back(value_token());
      if (!at(Tok::kComma)) fail("a domain needs at least two values");
      while (at(Tok::kComma)) {
        take();
        v.domain.push_back(value_token());
      }
    } else {
      v.domain = {"true", "false"};
    }
    expect(Tok::kEnd);
    try {
      sig_.add(std::move(v));
    } catch (const Error& e) {
      fail_at(e.what(), name.column);
    }
  }

  ProbabilisticConstraint constraint() {
    ProbabilisticConstraint c;
    if (at(Tok::kName) && peek(1).kind == Tok::kColon) {
      c.label = take().text;
      take();
    }
    expect(Tok::kLParen);
    c.consequent = disjunction();
    if (at(Tok::kBar)) {
      take();
      c.antecedent = disjunction();
    }
    expect(Tok::kRParen);
    expect(Tok::kLBracket);
    const Token num = expect(Tok::kNumber);
    double d = 0.0;
    const char* first = num.text.data();
    const char* last = first + num.text.size();
    auto res = std::from_chars(first, last, d, std::chars_format::fixed);
    if (res.ec != std::errc() || res.ptr != last) {
      fail_at("malformed probability '" + num.text + "'", num.column);
    }
    if (!(d >= 0.0 && d <= 1.0)) {
      fail_at("probability " + num.text + " outside [0,1]", num.column);
    }
    c.probability = d;
    expect(Tok::kRBracket);
    expect(Tok::kEnd);
    return c;
  }

 private:
  std::string value_token() {
    if (at(Tok::kName) || at(Tok::kNumber)) return take().text;
    fail(std::string("expected a domain value, found ") + describe(peek().kind));
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (at(Tok::kOr)) {
      take();
      f = Formula::disjunction(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (at(Tok::kAnd)) {
      take();
      f = Formula::conjunction(f, unary());
    }
    return f;
  }

  Formula unary() {
    if (at(Tok::kNot)) {
      take();
      // `!X` on a bare binary atom is the literal X=false.
      if (at(Tok::kName) && peek(1).kind != Tok::kEq && peek().text != "top") {
        const Token name = peek();
        const std::size_t var = variable(name);
        if (sig_.is_binary(var)) {
          take();
          return Formula::literal(var, *sig_.find_value(var, "false"));
        }
      }
      return Formula::negation(unary());
    }
    if (at(Tok::kLParen)) {
      take();
      Formula f = disjunction();
      expect(Tok::kRParen);
      return f;
    }
    return atom();
  }

  Formula atom() {
    const Token name = expect(Tok::kName);
    if (name.text == "top") return Formula::top();
    const std::size_t var = variable(name);
    if (at(Tok::kEq)) {
      take();
      const std::size_t col = peek().column;
      const std::string value = value_token();
      const auto x = sig_.find_value(var, value);
      if (!x) {
        fail_at("unknown value '" + value + "' for variable '" + name.text + "'",
                col);
      }
      return Formula::literal(var, *x);
    }
    if (!sig_.is_binary(var)) {
      fail_at("variable '" + name.text + "' is not binary; write " +
                  name.text + "=<value>",
              name.column);
    }
    return Formula::literal(var, *sig_.find_value(var, "true"));
  }

  std::size_t variable(const Token& name) {
    if (auto v = sig_.find(name.text)) return *v;
    if (opts_.auto_declare && !reserved(name.text)) {
      sig_.add_binary(name.text);
      return sig_.size() - 1;
    }
    fail_at("unknown variable '" + name.text + "'", name.column);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_;
  Signature& sig_;
  const ParseOptions& opts_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text, const ParseOptions& options) {
  Signature sig;
  std::vector<ProbabilisticConstraint> constraints;
  std::vector<std::size_t> lines;
  std::set<std::string> labels;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    auto toks = tokenize(line, line_no);
    if (toks.front().kind != Tok::kEnd) {
      LineParser p(std::move(toks), line_no, sig, options);
      if (p.at(Tok::kName) && p.peek().text == "var") {
        p.declaration();
      } else {
        const std::size_t column = p.peek().column;
        constraints.push_back(p.constraint());
        lines.push_back(line_no);
        const std::string& label = constraints.back().label;
        if (!label.empty() && !labels.insert(label).second) {
          throw ParseError("duplicate constraint label '" + label + "'",
                           line_no, column);
        }
      }
    }
    start = end + 1;
  }
  try {
    return KnowledgeBase(std::move(sig), std::move(constraints),
                         options.max_worlds);
  } catch (const SelfConsistencyError& e) {
    throw ParseError(e.what(), lines[e.index()], 1);
  } catch (const ParseError&) {
    throw;
  } catch (const CapExceededError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no, 1);
  }
}

}  // namespace probinc
