// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "names/core.hpp"

namespace names {

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;
};

enum class ParseErrorKind {
  UnexpectedToken,
  NamespaceClash,
  UnknownDirective,
  DanglingOperator,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, SourceSpan span, const std::string& message);

  ParseErrorKind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }

 private:
  ParseErrorKind kind_;
  SourceSpan span_;
};

// Expression grammar:
//   atom := "#"ident | "!"ident | ident | "self" | "(" expr ")"
//           | "(ref:" expr-list ")"
//   expr := atom { "." atom }          (left-associative)
// "(ref: e1, ..., en)" is sugar for the left fold of "."; with no components
// it denotes self. Bare identifiers must start with a lowercase letter.
ExprPtr parse_expr(std::string_view text);

// Formula grammar, loosest to tightest: "=>" (right-associative), "|", "&",
// "!", then atoms. Atoms are "expr >= expr", "key certs <atom-or-negation>",
// "false", and parenthesized formulas. "|", "=>", and "false" desugar at
// construction; the stored tree contains only containment, certificate,
// negation, and conjunction nodes.
FormulaPtr parse_formula(std::string_view text);

// World files are line oriented:
//   keys #k1 #k2 ...
//   global !G = #k1 #k2 ...
//   cert #k: <formula>
// A line whose first non-blank character is "#" is a comment; a mid-line
// comment starts at a "#" that is preceded by whitespace and followed by
// whitespace or end of line (key tokens glue "#" to the identifier, so they
// are never eaten). Duplicate global lines union; duplicate certs are
// idempotent. Every key occurring anywhere is declared.
World parse_world(std::string_view text);

// A witness document is a world file extended with assignment and viewpoint
// lines:
//   lna #k n = #k1 #k2 ...
//   viewpoint #k
struct WitnessDoc {
  World world;
  LocalNameAssignment lna;
  std::optional<Key> viewpoint;
};

WitnessDoc parse_witness(std::string_view text);

// Rendering inverts parsing: parse(render(x)) is structurally equal to x.
// Expressions print with minimal parentheses (only right-nested compounds
// need them); key lists print sorted.
std::string render(const ExprPtr& e);
std::string render(const FormulaPtr& f);
std::string render(const World& w);
std::string render_witness(const World& w, const LocalNameAssignment& lna,
                           const std::optional<Key>& viewpoint);

}  // namespace names
