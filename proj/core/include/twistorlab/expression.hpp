#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twistorlab/error.hpp"

namespace twistorlab {

/// Syntax error in a surface spec or expression, with 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Immutable arithmetic expression over named coordinates.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | coord | func '(' expr ')' | '(' expr ')' | '-' base
///   func   := sin | cos | exp | log | sqrt | tanh
class Expression {
 public:
  struct Node;

  Expression() = default;

  /// Parses `text`; coordinate names resolve to their index in `coords`.
  /// `line` and `column_offset` locate the text inside a larger file.
  static Expression parse(std::string_view text, std::span<const std::string> coords, int line = 1,
                          int column_offset = 0);
  static Expression constant(double value);

  double evaluate(std::span<const double> x) const;
  /// Fully parenthesised form that parses back to the same tree.
  std::string to_string(std::span<const std::string> coords) const;
  bool valid() const { return root_ != nullptr; }

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace twistorlab
