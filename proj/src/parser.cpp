// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/parser.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>
#include <vector>

namespace names {

namespace {

const char* kind_label(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::UnexpectedToken:
      return "unexpected token";
    case ParseErrorKind::NamespaceClash:
      return "namespace clash";
    case ParseErrorKind::UnknownDirective:
      return "unknown directive";
    case ParseErrorKind::DanglingOperator:
      return "dangling operator";
  }
  return "parse error";
}

std::string format_message(ParseErrorKind kind, const SourceSpan& span,
                           const std::string& message) {
  std::ostringstream os;
  os << "line " << span.line << ", column " << span.column << ": "
     << kind_label(kind) << ": " << message;
  return os.str();
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, SourceSpan span,
                       const std::string& message)
    : std::runtime_error(format_message(kind, span, message)),
      kind_(kind),
      span_(span) {}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  KeyName,     // #ident
  GlobalName,  // !ident
  Ident,       // bare identifier (any case; expression parser restricts)
  SelfWord,
  FalseWord,
  CertsWord,
  LParen,
  RParen,
  Dot,
  Comma,
  Colon,
  Equals,
  GreaterEq,
  Amp,
  Pipe,
  Arrow,
  Bang,  // "!" not immediately followed by an identifier (negation)
  End,
};

struct Token {
  Tok tok = Tok::End;
  std::string text;  // identifier payload for name tokens
  SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Tokenizes one logical chunk of text. line/column seed the spans so world
// files report positions in the original file.
std::vector<Token> lex(std::string_view text, int line, int column) {
  std::vector<Token> out;
  std::size_t i = 0;
  int col = column;
  auto span_at = [&](int length) { return SourceSpan{line, col, length}; };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#' || c == '!') {
      bool is_global = (c == '!');
      if (i + 1 < text.size() && ident_start(text[i + 1])) {
        std::size_t j = i + 1;
        while (j < text.size() && ident_char(text[j])) ++j;
        std::string id(text.substr(i + 1, j - i - 1));
        SourceSpan sp = span_at(static_cast<int>(j - i));
        if (id == "self") {
          throw ParseError(ParseErrorKind::NamespaceClash, sp,
                           "\"self\" is reserved and takes no prefix");
        }
        out.push_back({is_global ? Tok::GlobalName : Tok::KeyName, id, sp});
        col += static_cast<int>(j - i);
        i = j;
        continue;
      }
      if (is_global) {
        out.push_back({Tok::Bang, "!", span_at(1)});
        ++col;
        ++i;
        continue;
      }
      throw ParseError(ParseErrorKind::UnexpectedToken, span_at(1),
                       "\"#\" must be followed by a key identifier");
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string id(text.substr(i, j - i));
      SourceSpan sp = span_at(static_cast<int>(j - i));
      Tok t = Tok::Ident;
      if (id == "self") t = Tok::SelfWord;
      else if (id == "false") t = Tok::FalseWord;
      else if (id == "certs") t = Tok::CertsWord;
      out.push_back({t, id, sp});
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '(':
        out.push_back({Tok::LParen, "(", span_at(1)});
        break;
      case ')':
        out.push_back({Tok::RParen, ")", span_at(1)});
        break;
      case '.':
        out.push_back({Tok::Dot, ".", span_at(1)});
        break;
      case ',':
        out.push_back({Tok::Comma, ",", span_at(1)});
        break;
      case ':':
        out.push_back({Tok::Colon, ":", span_at(1)});
        break;
      case '&':
        out.push_back({Tok::Amp, "&", span_at(1)});
        break;
      case '|':
        out.push_back({Tok::Pipe, "|", span_at(1)});
        break;
      case '>':
        if (i + 1 < text.size() && text[i + 1] == '=') {
          out.push_back({Tok::GreaterEq, ">=", span_at(2)});
          ++col;
          ++i;
          break;
        }
        throw ParseError(ParseErrorKind::UnexpectedToken, span_at(1),
                         "expected \">=\"");
      case '=':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::Arrow, "=>", span_at(2)});
          ++col;
          ++i;
          break;
        }
        out.push_back({Tok::Equals, "=", span_at(1)});
        break;
      default:
        throw ParseError(ParseErrorKind::UnexpectedToken, span_at(1),
                         std::string("stray character \"") + c + "\"");
    }
    ++col;
    ++i;
  }
  out.push_back({Tok::End, "", span_at(0)});
  return out;
}

bool is_operator(Tok t) {
  switch (t) {
    case Tok::Dot:
    case Tok::Comma:
    case Tok::GreaterEq:
    case Tok::Amp:
    case Tok::Pipe:
    case Tok::Arrow:
    case Tok::Bang:
    case Tok::CertsWord:
    case Tok::Equals:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Recursive-descent parser over a token vector

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& advance() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  std::size_t position() const { return pos_; }
  void rewind(std::size_t p) { pos_ = p; }

  bool at(Tok t) const { return peek().tok == t; }
  bool eat(Tok t) {
    if (!at(t)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    // A missing operand right after an operator is reported as a dangling
    // operator rather than a generic unexpected token.
    bool after_op = pos_ > 0 && is_operator(tokens_[pos_ - 1].tok);
    bool missing_operand = t.tok == Tok::End || t.tok == Tok::RParen;
    if (after_op && missing_operand) {
      throw ParseError(ParseErrorKind::DanglingOperator, t.span,
                       "operator \"" + tokens_[pos_ - 1].text +
                           "\" is missing its operand");
    }
    throw ParseError(ParseErrorKind::UnexpectedToken, t.span, message);
  }

  void expect(Tok t, const std::string& what) {
    if (!eat(t)) fail("expected " + what);
  }

  // ---- expressions ----

  ExprPtr parse_expression() {
    ExprPtr acc = parse_atom();
    while (eat(Tok::Dot)) {
      acc = PrincipalExpr::compound(acc, parse_atom());
    }
    return acc;
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.tok) {
      case Tok::KeyName:
        advance();
        return PrincipalExpr::key(Key{t.text});
      case Tok::GlobalName:
        advance();
        return PrincipalExpr::global(GlobalName{t.text});
      case Tok::SelfWord:
        advance();
        return PrincipalExpr::self();
      case Tok::Ident: {
        if (std::isupper(static_cast<unsigned char>(t.text[0]))) {
          throw ParseError(ParseErrorKind::UnexpectedToken, t.span,
                           "local names start with a lowercase letter");
        }
        advance();
        return PrincipalExpr::local(LocalName{t.text});
      }
      case Tok::LParen: {
        advance();
        if (at(Tok::Ident) && peek().text == "ref" && peek(1).tok == Tok::Colon) {
          advance();
          advance();
          return parse_ref_tail();
        }
        ExprPtr inner = parse_expression();
        expect(Tok::RParen, "\")\"");
        return inner;
      }
      default:
        fail("expected a principal expression");
    }
  }

  // Already past "(ref:"; folds the component list with "." and reads the
  // closing parenthesis. No components means the current principal.
  ExprPtr parse_ref_tail() {
    if (eat(Tok::RParen)) return PrincipalExpr::self();
    ExprPtr acc = parse_expression();
    while (eat(Tok::Comma)) {
      acc = PrincipalExpr::compound(acc, parse_expression());
    }
    expect(Tok::RParen, "\")\"");
    return acc;
  }

  // ---- formulas ----

  FormulaPtr parse_formula_top() {
    FormulaPtr lhs = parse_or();
    if (eat(Tok::Arrow)) {
      return Formula::implication(lhs, parse_formula_top());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr acc = parse_and();
    while (eat(Tok::Pipe)) {
      acc = Formula::disjunction(acc, parse_and());
    }
    return acc;
  }

  FormulaPtr parse_and() {
    FormulaPtr acc = parse_unary();
    while (eat(Tok::Amp)) {
      acc = Formula::conjunction(acc, parse_unary());
    }
    return acc;
  }

  FormulaPtr parse_unary() {
    if (eat(Tok::Bang)) {
      return Formula::negation(parse_unary());
    }
    return parse_formula_atom();
  }

  FormulaPtr parse_formula_atom() {
    if (eat(Tok::FalseWord)) return Formula::falsum();

    if (at(Tok::KeyName) && peek(1).tok == Tok::CertsWord) {
      Key issuer{peek().text};
      advance();
      advance();
      return Formula::cert(std::move(issuer), parse_unary());
    }

    if (at(Tok::LParen)) {
      // Could be a parenthesized formula or the parenthesized left side of a
      // containment; try the formula reading first and fall back.
      std::size_t mark = position();
      try {
        advance();
        FormulaPtr inner = parse_formula_top();
        expect(Tok::RParen, "\")\"");
        return inner;
      } catch (const ParseError&) {
        rewind(mark);
      }
    }

    ExprPtr sup = parse_expression();
    if (at(Tok::CertsWord)) {
      throw ParseError(ParseErrorKind::NamespaceClash, peek().span,
                       "only a key may certify a formula");
    }
    if (!eat(Tok::GreaterEq)) fail("expected \">=\"");
    ExprPtr sub = parse_expression();
    return Formula::contains(std::move(sup), std::move(sub));
  }

  void expect_end() {
    if (!at(Tok::End)) fail("trailing input");
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Line handling for world files

// Comment rules: a line whose first non-blank character is "#" is all
// comment. Mid-line, "#" opens a comment only when preceded by whitespace and
// followed by whitespace or end of line; key tokens are "#" glued to an
// identifier, so they never match.
std::string_view strip_comment(std::string_view line) {
  std::size_t first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos) return line.substr(0, 0);
  if (line[first] == '#') return line.substr(0, 0);
  for (std::size_t i = first + 1; i < line.size(); ++i) {
    if (line[i] != '#') continue;
    bool blank_before = line[i - 1] == ' ' || line[i - 1] == '\t';
    bool blank_after = i + 1 >= line.size() || line[i + 1] == ' ' ||
                       line[i + 1] == '\t' || line[i + 1] == '\r';
    if (blank_before && blank_after) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(start)
                                : text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

KeySet parse_key_list(Parser& p) {
  KeySet keys;
  while (p.at(Tok::KeyName)) {
    keys.insert(Key{p.peek().text});
    p.advance();
  }
  p.expect_end();
  return keys;
}

// Shared by parse_world and parse_witness. Directives outside "allow" raise
// UnknownDirective, so plain world files reject witness lines.
struct DirectiveSet {
  bool lna = false;
  bool viewpoint = false;
};

WitnessDoc parse_lines(std::string_view text, const DirectiveSet& allow) {
  WitnessDoc doc;
  auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    std::string_view line = strip_comment(lines[idx]);
    int line_no = static_cast<int>(idx + 1);
    Parser p(lex(line, line_no, 1));
    if (p.at(Tok::End)) continue;

    if (!p.at(Tok::Ident)) {
      if (p.at(Tok::KeyName) || p.at(Tok::GlobalName)) {
        throw ParseError(ParseErrorKind::UnknownDirective, p.peek().span,
                         "a world line starts with a directive word");
      }
      p.fail("expected a directive");
    }
    std::string word = p.peek().text;
    SourceSpan word_span = p.peek().span;

    if (word == "keys") {
      p.advance();
      doc.world.declare_keys(parse_key_list(p));
      continue;
    }
    if (word == "global") {
      p.advance();
      if (!p.at(Tok::GlobalName)) p.fail("expected a global name (\"!name\")");
      GlobalName g{p.peek().text};
      p.advance();
      p.expect(Tok::Equals, "\"=\"");
      doc.world.bind_global(g, parse_key_list(p));
      continue;
    }
    if (word == "cert") {
      p.advance();
      if (!p.at(Tok::KeyName)) {
        throw ParseError(ParseErrorKind::NamespaceClash, p.peek().span,
                         "only a key may issue a certificate");
      }
      Key issuer{p.peek().text};
      p.advance();
      p.expect(Tok::Colon, "\":\"");
      FormulaPtr body = p.parse_formula_top();
      p.expect_end();
      doc.world.add_certificate(issuer, std::move(body));
      continue;
    }
    if (word == "lna" && allow.lna) {
      p.advance();
      if (!p.at(Tok::KeyName)) p.fail("expected a key");
      Key k{p.peek().text};
      p.advance();
      if (!p.at(Tok::Ident) ||
          std::isupper(static_cast<unsigned char>(p.peek().text[0]))) {
        p.fail("expected a local name");
      }
      LocalName n{p.peek().text};
      p.advance();
      p.expect(Tok::Equals, "\"=\"");
      KeySet value = parse_key_list(p);
      doc.world.declare_key(k);
      doc.world.declare_keys(value);
      KeySet merged = doc.lna.lookup(k, n);
      merged.insert(value.begin(), value.end());
      doc.lna.assign(k, n, std::move(merged));
      continue;
    }
    if (word == "viewpoint" && allow.viewpoint) {
      p.advance();
      if (!p.at(Tok::KeyName)) p.fail("expected a key");
      doc.viewpoint = Key{p.peek().text};
      p.advance();
      p.expect_end();
      doc.world.declare_key(*doc.viewpoint);
      continue;
    }
    throw ParseError(ParseErrorKind::UnknownDirective, word_span,
                     "unknown directive \"" + word + "\"");
  }
  return doc;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points

ExprPtr parse_expr(std::string_view text) {
  Parser p(lex(text, 1, 1));
  ExprPtr e = p.parse_expression();
  p.expect_end();
  return e;
}

FormulaPtr parse_formula(std::string_view text) {
  Parser p(lex(text, 1, 1));
  FormulaPtr f = p.parse_formula_top();
  p.expect_end();
  return f;
}

World parse_world(std::string_view text) {
  return parse_lines(text, DirectiveSet{}).world;
}

WitnessDoc parse_witness(std::string_view text) {
  return parse_lines(text, DirectiveSet{.lna = true, .viewpoint = true});
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_expr_into(const ExprPtr& e, std::string& out) {
  switch (e->kind()) {
    case PrincipalExpr::Kind::Key:
      out += "#";
      out += e->key_name().id;
      break;
    case PrincipalExpr::Kind::Global:
      out += "!";
      out += e->global_name().id;
      break;
    case PrincipalExpr::Kind::Local:
      out += e->local_name().id;
      break;
    case PrincipalExpr::Kind::Self:
      out += "self";
      break;
    case PrincipalExpr::Kind::Compound:
      render_expr_into(e->left(), out);
      out += " . ";
      // Only a compound right operand needs parentheses; the grammar is
      // left-associative.
      if (e->right()->kind() == PrincipalExpr::Kind::Compound) {
        out += "(";
        render_expr_into(e->right(), out);
        out += ")";
      } else {
        render_expr_into(e->right(), out);
      }
      break;
  }
}

void render_formula_into(const FormulaPtr& f, std::string& out) {
  switch (f->kind()) {
    case Formula::Kind::Contains:
      render_expr_into(f->sup(), out);
      out += " >= ";
      render_expr_into(f->sub(), out);
      break;
    case Formula::Kind::Cert:
      out += "#";
      out += f->issuer().id;
      out += " certs (";
      render_formula_into(f->body(), out);
      out += ")";
      break;
    case Formula::Kind::Not:
      out += "!";
      if (f->child()->kind() == Formula::Kind::Not) {
        render_formula_into(f->child(), out);
      } else {
        out += "(";
        render_formula_into(f->child(), out);
        out += ")";
      }
      break;
    case Formula::Kind::And: {
      // Conjunction chains print flat; a conjunction as the right operand is
      // parenthesized to preserve the tree shape.
      render_formula_into(f->lhs(), out);
      out += " & ";
      if (f->rhs()->kind() == Formula::Kind::And) {
        out += "(";
        render_formula_into(f->rhs(), out);
        out += ")";
      } else {
        render_formula_into(f->rhs(), out);
      }
      break;
    }
  }
}

void append_key_list(const KeySet& keys, std::string& out) {
  for (const Key& k : keys) {
    out += " #";
    out += k.id;
  }
}

void render_world_into(const World& w, std::string& out) {
  if (!w.declared_keys.empty()) {
    out += "keys";
    append_key_list(w.declared_keys, out);
    out += "\n";
  }
  for (const auto& [g, ks] : w.globals) {
    out += "global !";
    out += g.id;
    out += " =";
    append_key_list(ks, out);
    out += "\n";
  }
  for (const auto& [issuer, certs] : w.certificates) {
    for (const auto& body : certs) {
      out += "cert #";
      out += issuer.id;
      out += ": ";
      render_formula_into(body, out);
      out += "\n";
    }
  }
}

}  // namespace

std::string render(const ExprPtr& e) {
  std::string out;
  render_expr_into(e, out);
  return out;
}

std::string render(const FormulaPtr& f) {
  std::string out;
  render_formula_into(f, out);
  return out;
}

std::string render(const World& w) {
  std::string out;
  render_world_into(w, out);
  return out;
}

std::string render_witness(const World& w, const LocalNameAssignment& lna,
                           const std::optional<Key>& viewpoint) {
  std::string out;
  render_world_into(w, out);
  for (const auto& [entry, value] : lna.entries()) {
    out += "lna #";
    out += entry.first.id;
    out += " ";
    out += entry.second.id;
    out += " =";
    append_key_list(value, out);
    out += "\n";
  }
  if (viewpoint) {
    out += "viewpoint #";
    out += viewpoint->id;
    out += "\n";
  }
  return out;
}

}  // namespace names
