#pragma once

// Script language: a Maxima-flavoured subset.
//
//   imetric(g)$
//   components(F([m,n],[]),extdiff(A([m],[]),n))$
//   L:-1/4*F([k,l],[])*F([a,b],[])*g([],[k,a])*g([],[l,b])$
//   ishow(diff(L,A([m],[],n)))$
//
// Indexed objects are written NAME([cov...],[contra...],deriv...). The
// plain rendering produced by the printer (`F_{a b,k}^{c}`, `F^{m n}_{;n}`)
// is accepted as an alternative literal syntax, with juxtaposition meaning
// multiplication.

#include "indicial/expr.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace indicial {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class NodeKind {
  Number,     // exact rational literal
  Symbol,     // bare identifier or generated label
  List,       // [a, b, ...]
  Call,       // name(args...)
  Indexed,    // tensor literal in either syntax, held in `factor`
  Group,      // (product)_{;i} literal; operand in args[0], slots in `factor.derivs`
  Unary,      // text == "-"
  Binary,     // text is one of + - * / ^ = :
  Quote,      // 'call
  History,    // `%`; `%th(n)` is a Call
};

struct Node {
  NodeKind kind = NodeKind::Symbol;
  std::string text;
  Rational number{0};
  Factor factor;
  std::vector<NodePtr> args;
  int line = 1;
  int column = 1;
};

enum class StatementKind { Expression, Assignment, Command };

struct Statement {
  StatementKind kind = StatementKind::Expression;
  NodePtr node;            // whole statement; for assignments the right-hand side
  std::string name;        // command name or assignment target
  bool echo = true;        // `;` echoes, `$` is silent
  int line = 1;
};

/// Names accepted as commands or built-in functions.
bool is_known_function(std::string_view name);

std::vector<Statement> parse_program(std::string_view text);
/// Exactly one statement; a missing terminator is treated as `;`.
Statement parse_statement(std::string_view text);
NodePtr parse_node(std::string_view text);

/// Parses a pure tensor expression (literals, arithmetic, `'covdiff`).
Expression parse_expression(std::string_view text);

/// Converts a pure expression node; commands and variables are rejected.
Expression to_expression(const Node& node);
/// Extracts an indexed-object literal, e.g. the target of `diff`.
Factor to_factor(const Node& node);

}  // namespace indicial
