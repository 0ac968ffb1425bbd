// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/formula.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {

namespace {

using Node = ParametricFormula::Node;

std::unique_ptr<Node> clone(const Node* node) {
  if (node == nullptr) return nullptr;
  auto copy = std::make_unique<Node>();
  copy->kind = node->kind;
  copy->value = node->value;
  copy->name = node->name;
  copy->op = node->op;
  copy->lhs = clone(node->lhs.get());
  copy->rhs = clone(node->rhs.get());
  return copy;
}

struct Token {
  enum class Kind { number, ident, op, lparen, rparen, end };
  Kind kind = Kind::end;
  double number = 0.0;
  std::string ident;
  char op = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_blank();
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) {
      current_.kind = Token::Kind::end;
      return;
    }
    char c = text_[pos_];
    if (c >= '0' && c <= '9') {
      lex_number();
      return;
    }
    if (is_ident_start(c)) {
      lex_ident();
      return;
    }
    switch (c) {
      case '+':
      case '-':
      case '*':
      case '/':
        current_.kind = Token::Kind::op;
        current_.op = c;
        consume();
        return;
      case '(':
        current_.kind = Token::Kind::lparen;
        consume();
        return;
      case ')':
        current_.kind = Token::Kind::rparen;
        consume();
        return;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') consume();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        consume();
      } else {
        break;
      }
    }
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }

  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  void lex_number() {
    std::size_t start = pos_;
    std::size_t start_line = line_;
    std::size_t start_col = column_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') consume();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      consume();
      if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
        throw ParseError("digit expected after decimal point", line_, column_);
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') consume();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      consume();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) consume();
      if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
        throw ParseError("digit expected in exponent", line_, column_);
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') consume();
    }
    auto parsed = try_parse_double(text_.substr(start, pos_ - start));
    if (!parsed) throw ParseError("invalid number", start_line, start_col);
    current_.kind = Token::Kind::number;
    current_.number = *parsed;
  }

  void lex_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) consume();
    current_.kind = Token::Kind::ident;
    current_.ident = std::string(text_.substr(start, pos_ - start));
  }

  void consume() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  Token current_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  std::unique_ptr<Node> parse() {
    if (lexer_.peek().kind == Token::Kind::end)
      throw ParseError("empty formula", lexer_.peek().line, lexer_.peek().column);
    auto root = parse_expr();
    const Token& t = lexer_.peek();
    if (t.kind != Token::Kind::end)
      throw ParseError("unexpected trailing input", t.line, t.column);
    return root;
  }

 private:
  std::unique_ptr<Node> parse_expr() {
    auto lhs = parse_term();
    while (lexer_.peek().kind == Token::Kind::op &&
           (lexer_.peek().op == '+' || lexer_.peek().op == '-')) {
      Token op = lexer_.take();
      auto rhs = parse_term();
      lhs = make_binary(op.op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  std::unique_ptr<Node> parse_term() {
    auto lhs = parse_factor();
    while (lexer_.peek().kind == Token::Kind::op &&
           (lexer_.peek().op == '*' || lexer_.peek().op == '/')) {
      Token op = lexer_.take();
      auto rhs = parse_factor();
      lhs = make_binary(op.op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  std::unique_ptr<Node> parse_factor() {
    const Token& t = lexer_.peek();
    switch (t.kind) {
      case Token::Kind::number: {
        Token tok = lexer_.take();
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::number;
        node->value = tok.number;
        return node;
      }
      case Token::Kind::ident: {
        Token tok = lexer_.take();
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::variable;
        node->name = tok.ident;
        return node;
      }
      case Token::Kind::lparen: {
        lexer_.take();
        auto inner = parse_expr();
        const Token& close = lexer_.peek();
        if (close.kind != Token::Kind::rparen)
          throw ParseError("expected ')'", close.line, close.column);
        lexer_.take();
        return inner;
      }
      case Token::Kind::end:
        throw ParseError("unexpected end of input", t.line, t.column);
      default:
        throw ParseError("expected number, variable, or '('", t.line, t.column);
    }
  }

  static std::unique_ptr<Node> make_binary(char op, std::unique_ptr<Node> lhs,
                                           std::unique_ptr<Node> rhs) {
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::binary;
    node->op = op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  Lexer lexer_;
};

void collect_variables(const Node* node, std::vector<std::string>& out) {
  if (node == nullptr) return;
  if (node->kind == Node::Kind::variable) {
    if (std::find(out.begin(), out.end(), node->name) == out.end()) out.push_back(node->name);
    return;
  }
  collect_variables(node->lhs.get(), out);
  collect_variables(node->rhs.get(), out);
}

double eval_node(const Node* node, const Binding& binding) {
  switch (node->kind) {
    case Node::Kind::number:
      return node->value;
    case Node::Kind::variable: {
      auto it = binding.find(node->name);
      if (it == binding.end()) throw EvalError("unbound variable '" + node->name + "'");
      return it->second;
    }
    case Node::Kind::binary: {
      double lhs = eval_node(node->lhs.get(), binding);
      double rhs = eval_node(node->rhs.get(), binding);
      switch (node->op) {
        case '+':
          return lhs + rhs;
        case '-':
          return lhs - rhs;
        case '*':
          return lhs * rhs;
        case '/':
          if (rhs == 0.0) throw EvalError("division by zero");
          return lhs / rhs;
      }
      break;
    }
  }
  throw EvalError("corrupt formula tree");
}

int precedence(const Node* node) {
  if (node->kind != Node::Kind::binary) return 3;
  return (node->op == '+' || node->op == '-') ? 1 : 2;
}

// All operators are left-associative, so the right child needs parentheses
// already at equal precedence; the left child only below it.
void serialize_node(const Node* node, std::string& out) {
  switch (node->kind) {
    case Node::Kind::number:
      out += format_double(node->value);
      return;
    case Node::Kind::variable:
      out += node->name;
      return;
    case Node::Kind::binary: {
      int prec = precedence(node);
      bool lhs_parens = precedence(node->lhs.get()) < prec;
      bool rhs_parens = precedence(node->rhs.get()) <= prec;
      if (lhs_parens) out += '(';
      serialize_node(node->lhs.get(), out);
      if (lhs_parens) out += ')';
      out += ' ';
      out += node->op;
      out += ' ';
      if (rhs_parens) out += '(';
      serialize_node(node->rhs.get(), out);
      if (rhs_parens) out += ')';
      return;
    }
  }
}

bool nodes_identical(const Node* a, const Node* b) {
  if (a == nullptr || b == nullptr) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Node::Kind::number:
      return a->value == b->value;
    case Node::Kind::variable:
      return a->name == b->name;
    case Node::Kind::binary:
      return a->op == b->op && nodes_identical(a->lhs.get(), b->lhs.get()) &&
             nodes_identical(a->rhs.get(), b->rhs.get());
  }
  return false;
}

}  // namespace

ParametricFormula::ParametricFormula(const ParametricFormula& other)
    : root_(clone(other.root_.get())), variables_(other.variables_) {}

ParametricFormula& ParametricFormula::operator=(const ParametricFormula& other) {
  if (this != &other) {
    root_ = clone(other.root_.get());
    variables_ = other.variables_;
  }
  return *this;
}

ParametricFormula ParametricFormula::parse(std::string_view text) {
  Parser parser(text);
  ParametricFormula formula;
  formula.root_ = parser.parse();
  collect_variables(formula.root_.get(), formula.variables_);
  return formula;
}

double ParametricFormula::evaluate(const Binding& binding) const {
  if (root_ == nullptr) throw EvalError("empty formula");
  return eval_node(root_.get(), binding);
}

std::string ParametricFormula::serialize() const {
  std::string out;
  if (root_ != nullptr) serialize_node(root_.get(), out);
  return out;
}

bool ParametricFormula::identical_to(const ParametricFormula& other) const {
  return nodes_identical(root_.get(), other.root_.get());
}

double global_reliability(const ParametricFormula& formula, const Binding& reliabilities) {
  double value = formula.evaluate(reliabilities);
  if (value < 0.0) return 0.0;
  if (value > 1.0) return 1.0;
  return value;
}

}  // namespace adaptctl
