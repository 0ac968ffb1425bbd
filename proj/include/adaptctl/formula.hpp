// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace adaptctl {

/// Variable name -> finite value. std::map so iteration order is stable.
using Binding = std::map<std::string, double>;

/// Arithmetic expression over named variables.
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := NUMBER | IDENT | '(' expr ')'
///
/// '#' starts a comment running to end of line. Trees are immutable after
/// parsing; evaluation is pure.
class ParametricFormula {
 public:
  ParametricFormula() = default;
  ParametricFormula(const ParametricFormula& other);
  ParametricFormula& operator=(const ParametricFormula& other);
  ParametricFormula(ParametricFormula&&) noexcept = default;
  ParametricFormula& operator=(ParametricFormula&&) noexcept = default;
  ~ParametricFormula() = default;

  /// Throws ParseError (with 1-based line/column) on malformed or empty input.
  static ParametricFormula parse(std::string_view text);

  /// Throws EvalError on an unbound variable (named in the message) or
  /// division by zero. Results outside [0, 1] are allowed.
  double evaluate(const Binding& binding) const;

  /// Distinct variables in first-occurrence order.
  const std::vector<std::string>& variables() const { return variables_; }

  /// Minimal-parenthesis text; parsing it again gives a structurally
  /// identical tree.
  std::string serialize() const;

  bool identical_to(const ParametricFormula& other) const;

  struct Node {
    enum class Kind { number, variable, binary };
    Kind kind = Kind::number;
    double value = 0.0;      // number
    std::string name;        // variable
    char op = 0;             // binary: one of + - * /
    std::unique_ptr<Node> lhs;
    std::unique_ptr<Node> rhs;
  };

 private:
  std::unique_ptr<Node> root_;
  std::vector<std::string> variables_;
};

/// evaluate() clamped into [0, 1]; the global property observed by the
/// control loop.
double global_reliability(const ParametricFormula& formula, const Binding& reliabilities);

}  // namespace adaptctl
