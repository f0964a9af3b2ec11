#include "twistorlab/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace twistorlab {

ParseError::ParseError(const std::string& what, int line, int column)
    : Error("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            what),
      line_(line),
      column_(column) {}

enum class Op { Number, Coord, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt, Tanh };

struct Expression::Node {
  Op op;
  double value = 0.0;  // Number
  int index = 0;       // Coord, or the integer exponent for Pow
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

constexpr std::array<std::pair<std::string_view, Op>, 6> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"exp", Op::Exp},
    {"log", Op::Log},
    {"sqrt", Op::Sqrt},
    {"tanh", Op::Tanh},
}};

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords, int line, int col_offset)
      : text_(text), coords_(coords), line_(line), col_offset_(col_offset) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, col_offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '#') {
        pos_ = text_.size();
      } else if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, lhs, factor());
      } else if (accept('/')) {
        lhs = make(Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      int exponent = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start + (text_[start] == '+' ? 1 : 0), text_.data() + pos_,
                                       exponent);
      if (ec != std::errc() || ptr != text_.data() + pos_) {
        pos_ = start;
        fail("integer exponent expected after '^'");
      }
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Pow;
      n->lhs = b;
      n->index = exponent;
      return n;
    }
    return b;
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make(Op::Neg, base());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      for (auto [fname, op] : kFunctions) {
        if (name == fname) {
          if (!accept('(')) fail("'(' expected after function " + std::string(name));
          NodePtr arg = expr();
          if (!accept(')')) fail("')' expected");
          return make(op, arg);
        }
      }
      for (std::size_t k = 0; k < coords_.size(); ++k) {
        if (name == coords_[k]) {
          auto n = std::make_shared<Expression::Node>();
          n->op = Op::Coord;
          n->index = static_cast<int>(k);
          return n;
        }
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Number;
    n->value = v;
    return n;
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  int line_;
  int col_offset_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Coord: return x[n.index];
    case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::Pow: {
      const double b = eval(*n.lhs, x);
      double r = 1.0;
      for (int k = 0; k < std::abs(n.index); ++k) r *= b;
      return n.index < 0 ? 1.0 / r : r;
    }
    case Op::Neg: return -eval(*n.lhs, x);
    case Op::Sin: return std::sin(eval(*n.lhs, x));
    case Op::Cos: return std::cos(eval(*n.lhs, x));
    case Op::Exp: return std::exp(eval(*n.lhs, x));
    case Op::Log: return std::log(eval(*n.lhs, x));
    case Op::Sqrt: return std::sqrt(eval(*n.lhs, x));
    case Op::Tanh: return std::tanh(eval(*n.lhs, x));
  }
  return 0.0;
}

void print(const Expression::Node& n, std::span<const std::string> coords, std::ostream& os) {
  auto binary = [&](char op) {
    os << '(';
    print(*n.lhs, coords, os);
    os << ' ' << op << ' ';
    print(*n.rhs, coords, os);
    os << ')';
  };
  switch (n.op) {
    case Op::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", std::abs(n.value));
      if (n.value < 0) {
        os << "(-" << buf << ')';
      } else {
        os << buf;
      }
      return;
    }
    case Op::Coord: os << coords[n.index]; return;
    case Op::Add: binary('+'); return;
    case Op::Sub: binary('-'); return;
    case Op::Mul: binary('*'); return;
    case Op::Div: binary('/'); return;
    case Op::Pow:
      os << '(';
      print(*n.lhs, coords, os);
      os << ")^" << n.index;
      return;
    case Op::Neg:
      os << "(-";
      print(*n.lhs, coords, os);
      os << ')';
      return;
    default:
      for (auto [fname, op] : kFunctions) {
        if (op == n.op) os << fname;
      }
      os << '(';
      print(*n.lhs, coords, os);
      os << ')';
  }
}

}  // namespace

Expression Expression::parse(std::string_view text, std::span<const std::string> coords, int line,
                             int column_offset) {
  return Expression(Parser(text, coords, line, column_offset).parse_all());
}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Number;
  n->value = value;
  return Expression(n);
}

double Expression::evaluate(std::span<const double> x) const {
  if (!root_) throw Error("evaluating an empty expression");
  return eval(*root_, x);
}

std::string Expression::to_string(std::span<const std::string> coords) const {
  if (!root_) return "0";
  std::ostringstream os;
  print(*root_, coords, os);
  return os.str();
}

}  // namespace twistorlab
