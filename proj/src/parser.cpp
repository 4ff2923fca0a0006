#include "indicial/parser.hpp"

#include "indicial/calculus.hpp"
#include "indicial/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace indicial {

namespace {

enum class Tok {
  Number,
  Ident,
  Label,
  Percent,
  LowerOpen,
  UpperOpen,
  RBrace,
  LParen,
  RParen,
  LBrack,
  RBrack,
  Comma,
  Semi,
  Dollar,
  Colon,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  Equal,
  Quote,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
  bool space_before = false;
};

constexpr std::array kKnownFunctions = {
    "load",       "imetric",    "idim",        "decsym",       "components", "remcomps",
    "matchdeclare", "defrule",  "apply",       "apply1",       "ishow",      "canform",
    "contract",   "expand",     "diff",        "idiff",        "covdiff",    "extdiff",
    "lhs",        "map",        "lambda",      "mapcovdiff",   "%th",        "christoffel",
    "ev",         "euler_lagrange", "conservation", "rename",  "quit",       "anti",
    "sym",        "kill",
};

[[noreturn]] void syntax_error(int line, int column, const std::string& what) {
  fail(ErrorCode::SyntaxError,
       "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

bool ident_start(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  bool space = false;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::string text, int l, int c) {
    out.push_back(Token{kind, std::move(text), l, c, space});
    space = false;
  };

  while (i < src.size()) {
    unsigned char c = src[i];
    int l = line, cl = col;
    if (std::isspace(c)) {
      advance(1);
      space = true;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) syntax_error(l, cl, "unterminated comment");
      advance(end + 2 - i);
      space = true;
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (src[j] == '.' || ident_start(static_cast<unsigned char>(src[j]))))
        syntax_error(l, cl, "only integer literals are supported");
      push(Tok::Number, std::string(src.substr(i, j - i)), l, cl);
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(static_cast<unsigned char>(src[j]))) {
        if (src[j] == '_' && j + 1 < src.size() && src[j + 1] == '{') break;
        ++j;
      }
      push(Tok::Ident, std::string(src.substr(i, j - i)), l, cl);
      advance(j - i);
      continue;
    }
    if (c == '%') {
      std::size_t j = i + 1;
      if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        push(Tok::Label, std::string(src.substr(i, j - i)), l, cl);
      } else if (src.substr(i, 3) == "%th") {
        j = i + 3;
        push(Tok::Ident, "%th", l, cl);
      } else {
        push(Tok::Percent, "%", l, cl);
      }
      advance(j - i);
      continue;
    }
    if (c == '_' && i + 1 < src.size() && src[i + 1] == '{') {
      push(Tok::LowerOpen, "_{", l, cl);
      advance(2);
      continue;
    }
    if (c == '^' && i + 1 < src.size() && src[i + 1] == '{') {
      push(Tok::UpperOpen, "^{", l, cl);
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '}': kind = Tok::RBrace; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '[': kind = Tok::LBrack; break;
      case ']': kind = Tok::RBrack; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      case '$': kind = Tok::Dollar; break;
      case ':': kind = Tok::Colon; break;
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '=': kind = Tok::Equal; break;
      case '\'': kind = Tok::Quote; break;
      default: syntax_error(l, cl, std::string("unexpected character '") + char(c) + "'");
    }
    push(kind, std::string(1, char(c)), l, cl);
    advance(1);
  }
  out.push_back(Token{Tok::End, "", line, col, space});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  bool at_end() const { return peek().kind == Tok::End; }

  Statement statement() {
    while (peek().kind == Tok::Semi || peek().kind == Tok::Dollar) ++pos_;
    Statement st;
    st.line = peek().line;
    if (at_end()) return st;
    NodePtr node = expression();
    if (peek().kind == Tok::Colon) {
      if (node->kind != NodeKind::Symbol)
        syntax_error(peek().line, peek().column, "assignment target must be a name");
      ++pos_;
      st.kind = StatementKind::Assignment;
      st.name = node->text;
      st.node = expression();
    } else {
      st.node = node;
      if (node->kind == NodeKind::Call) {
        st.kind = StatementKind::Command;
        st.name = node->text;
      }
    }
    const Token& t = peek();
    if (t.kind == Tok::Semi || t.kind == Tok::Dollar) {
      st.echo = t.kind == Tok::Semi;
      ++pos_;
    } else if (t.kind != Tok::End) {
      syntax_error(t.line, t.column, "expected ';' or '$' but found '" + t.text + "'");
    }
    return st;
  }

  NodePtr expression() {
    NodePtr lhs = sum();
    if (peek().kind == Tok::Equal) {
      auto op = next();
      lhs = binary("=", lhs, sum(), op);
    }
    return lhs;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind)
      syntax_error(t.line, t.column,
                   std::string("expected ") + what + (t.kind == Tok::End ? " at end of input"
                                                                          : " but found '" + t.text + "'"));
    return next();
  }

  static std::shared_ptr<Node> make(NodeKind kind, const Token& at) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->line = at.line;
    n->column = at.column;
    return n;
  }

  static NodePtr binary(const std::string& op, NodePtr l, NodePtr r, const Token& at) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->text = op;
    n->args = {std::move(l), std::move(r)};
    n->line = at.line;
    n->column = at.column;
    return n;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = next();
      lhs = binary(op.text, lhs, product(), op);
    }
    return lhs;
  }

  bool starts_juxtaposed_operand() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::Label:
      case Tok::LParen:
      case Tok::Quote:
      case Tok::Percent:
        return true;
      default:
        return false;
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
        const Token& op = next();
        lhs = binary(op.text, lhs, unary(), op);
      } else if (starts_juxtaposed_operand()) {
        const Token& at = peek();
        lhs = binary("*", lhs, unary(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (peek().kind == Tok::Minus) {
      const Token& op = next();
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Unary;
      n->text = "-";
      n->line = op.line;
      n->column = op.column;
      n->args = {unary()};
      return n;
    }
    if (peek().kind == Tok::Plus) {
      next();
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::Caret) {
      const Token& op = next();
      return binary("^", base, unary(), op);
    }
    return base;
  }

  std::vector<NodePtr> arguments() {
    std::vector<NodePtr> args;
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      args.push_back(expression());
      while (peek().kind == Tok::Comma) {
        next();
        args.push_back(expression());
      }
    }
    expect(Tok::RParen, "')'");
    return args;
  }

  std::string index_label() {
    const Token& t = peek();
    if (t.kind != Tok::Ident && t.kind != Tok::Label)
      syntax_error(t.line, t.column, "expected an index label");
    return next().text;
  }

  // Blocks of the plain rendering: `_{a b,i j;k}` and `^{c d}`.
  void index_blocks(Factor& f) {
    for (;;) {
      if (peek().space_before) return;
      if (peek().kind == Tok::UpperOpen) {
        next();
        while (peek().kind != Tok::RBrace) f.slots.push_back({index_label(), Variance::Upper});
        next();
      } else if (peek().kind == Tok::LowerOpen) {
        next();
        deriv_block(f, /*allow_slots=*/true);
      } else {
        return;
      }
    }
  }

  void deriv_block(Factor& f, bool allow_slots) {
    enum class Mode { Slots, Ordinary, Covariant } mode = Mode::Slots;
    while (peek().kind != Tok::RBrace) {
      const Token& t = peek();
      if (t.kind == Tok::Comma) {
        mode = Mode::Ordinary;
        next();
        continue;
      }
      if (t.kind == Tok::Semi) {
        mode = Mode::Covariant;
        next();
        continue;
      }
      if (mode == Mode::Slots) {
        if (!allow_slots) syntax_error(t.line, t.column, "expected ',' or ';' in derivative block");
        f.slots.push_back({index_label(), Variance::Lower});
      } else {
        f.derivs.push_back(
            {index_label(), mode == Mode::Ordinary ? DerivKind::Ordinary : DerivKind::Covariant});
      }
    }
    next();
  }

  NodePtr indexed_from_call(const Token& at, const std::string& name,
                            const std::vector<NodePtr>& args) {
    auto n = make(NodeKind::Indexed, at);
    n->factor.name = name;
    auto labels_of = [&](const Node& list, Variance v) {
      for (const auto& item : list.args) {
        if (item->kind != NodeKind::Symbol)
          syntax_error(item->line, item->column, "index lists may only contain index labels");
        n->factor.slots.push_back({item->text, v});
      }
    };
    labels_of(*args[0], Variance::Lower);
    std::size_t k = 1;
    if (args.size() > 1 && args[1]->kind == NodeKind::List) {
      labels_of(*args[1], Variance::Upper);
      k = 2;
    }
    for (; k < args.size(); ++k) {
      if (args[k]->kind != NodeKind::Symbol)
        syntax_error(args[k]->line, args[k]->column, "derivative indices must be labels");
      n->factor.derivs.push_back({args[k]->text, DerivKind::Ordinary});
    }
    return n;
  }

  NodePtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        std::int64_t value = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc()) syntax_error(t.line, t.column, "integer literal out of range");
        auto n = make(NodeKind::Number, t);
        n->number = Rational(value);
        n->text = t.text;
        return n;
      }
      case Tok::Label: {
        next();
        auto n = make(NodeKind::Symbol, t);
        n->text = t.text;
        return n;
      }
      case Tok::Percent: {
        next();
        auto n = make(NodeKind::History, t);
        n->number = Rational(1);
        return n;
      }
      case Tok::Quote: {
        next();
        const Token& at = peek();
        NodePtr inner = primary();
        if (inner->kind != NodeKind::Call) syntax_error(at.line, at.column, "quote must precede a call");
        auto n = make(NodeKind::Quote, t);
        n->text = inner->text;
        n->args = {inner};
        return n;
      }
      case Tok::LBrack: {
        next();
        auto n = make(NodeKind::List, t);
        if (peek().kind != Tok::RBrack) {
          n->args.push_back(expression());
          while (peek().kind == Tok::Comma) {
            next();
            n->args.push_back(expression());
          }
        }
        expect(Tok::RBrack, "']'");
        return n;
      }
      case Tok::LParen: {
        next();
        NodePtr inner = expression();
        expect(Tok::RParen, "')'");
        if (peek().kind == Tok::LowerOpen && !peek().space_before) {
          next();
          auto n = make(NodeKind::Group, t);
          n->args = {inner};
          deriv_block(n->factor, /*allow_slots=*/false);
          return n;
        }
        return inner;
      }
      case Tok::Ident: {
        next();
        if (peek().kind == Tok::LParen && !peek().space_before) {
          auto args = arguments();
          if (is_known_function(t.text)) {
            auto n = make(NodeKind::Call, t);
            n->text = t.text;
            n->args = std::move(args);
            return n;
          }
          if (!args.empty() && args[0]->kind == NodeKind::List) return indexed_from_call(t, t.text, args);
          fail(ErrorCode::UnknownCommand, "line " + std::to_string(t.line) + ", column " +
                                              std::to_string(t.column) + ": unknown function " + t.text);
        }
        if ((peek().kind == Tok::LowerOpen || peek().kind == Tok::UpperOpen) && !peek().space_before) {
          auto n = make(NodeKind::Indexed, t);
          n->factor.name = t.text;
          index_blocks(n->factor);
          return n;
        }
        auto n = make(NodeKind::Symbol, t);
        n->text = t.text;
        return n;
      }
      default:
        syntax_error(t.line, t.column,
                     t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Expression power_of(const Expression& base, const Rational& exponent, const Node& at) {
  if (exponent.denominator() != 1 || exponent < 0)
    syntax_error(at.line, at.column, "only non-negative integer powers are supported");
  Expression out{Rational(1)};
  for (std::int64_t k = 0; k < exponent.numerator(); ++k) out = out * base;
  return out;
}

}  // namespace

bool is_known_function(std::string_view name) {
  for (auto f : kKnownFunctions)
    if (name == f) return true;
  return false;
}

std::vector<Statement> parse_program(std::string_view text) {
  Parser p(tokenize(text));
  std::vector<Statement> out;
  for (;;) {
    Statement st = p.statement();
    if (!st.node) break;
    out.push_back(std::move(st));
    if (p.at_end()) break;
  }
  return out;
}

Statement parse_statement(std::string_view text) {
  Parser p(tokenize(text));
  Statement st = p.statement();
  if (!p.at_end()) fail(ErrorCode::SyntaxError, "more than one statement");
  return st;
}

NodePtr parse_node(std::string_view text) {
  Parser p(tokenize(text));
  NodePtr n = p.expression();
  if (!p.at_end()) fail(ErrorCode::SyntaxError, "trailing input after expression");
  return n;
}

Expression parse_expression(std::string_view text) { return to_expression(*parse_node(text)); }

Factor to_factor(const Node& node) {
  if (node.kind == NodeKind::Indexed) return node.factor;
  if (node.kind == NodeKind::Symbol && !is_generated_label(node.text)) return Factor{node.text, {}, {}, {}};
  fail(ErrorCode::InvalidArgument, "expected an indexed object at line " + std::to_string(node.line));
}

Expression to_expression(const Node& node) {
  switch (node.kind) {
    case NodeKind::Number:
      return Expression(node.number);
    case NodeKind::Symbol:
      if (is_generated_label(node.text))
        syntax_error(node.line, node.column, "generated label used outside an index position");
      return Expression(Factor{node.text, {}, {}, {}});
    case NodeKind::Indexed:
      return Expression(node.factor);
    case NodeKind::Group: {
      Expression inner = to_expression(*node.args[0]);
      Expression out;
      for (auto t : inner.terms) {
        if (t.factors.empty()) continue;
        if (t.factors.size() == 1) {
          auto& f = t.factors.front();
          f.derivs.insert(f.derivs.end(), node.factor.derivs.begin(), node.factor.derivs.end());
        } else {
          Factor g;
          g.group = std::move(t.factors);
          g.derivs = node.factor.derivs;
          t.factors = {std::move(g)};
        }
        out.terms.push_back(std::move(t));
      }
      return out;
    }
    case NodeKind::Unary:
      return -to_expression(*node.args[0]);
    case NodeKind::Binary: {
      const Node& l = *node.args[0];
      const Node& r = *node.args[1];
      if (node.text == "+") return to_expression(l) + to_expression(r);
      if (node.text == "-" || node.text == "=") return to_expression(l) - to_expression(r);
      if (node.text == "*") return to_expression(l) * to_expression(r);
      if (node.text == "/") {
        Expression denom = to_expression(r);
        if (denom.terms.size() != 1 || !denom.terms[0].factors.empty())
          syntax_error(r.line, r.column, "division is only supported by nonzero numbers");
        return (Rational(1) / denom.terms[0].coeff) * to_expression(l);
      }
      if (node.text == "^") {
        Expression ex = to_expression(r);
        Rational k = ex.is_zero() ? Rational(0) : ex.terms[0].coeff;
        if (ex.terms.size() > 1 || (!ex.is_zero() && !ex.terms[0].factors.empty()))
          syntax_error(r.line, r.column, "exponent must be an integer literal");
        return power_of(to_expression(l), k, node);
      }
      break;
    }
    case NodeKind::Quote: {
      const Node& call = *node.args[0];
      if (call.text == "covdiff" && call.args.size() >= 2) {
        Expression e = to_expression(*call.args[0]);
        for (std::size_t k = 1; k < call.args.size(); ++k) {
          if (call.args[k]->kind != NodeKind::Symbol)
            syntax_error(call.args[k]->line, call.args[k]->column, "covdiff index must be a label");
          e = covdiff_inert(e, call.args[k]->text);
        }
        return e;
      }
      break;
    }
    default:
      break;
  }
  fail(ErrorCode::InvalidArgument, "not a pure tensor expression at line " + std::to_string(node.line) +
                                       ", column " + std::to_string(node.column));
}

}  // namespace indicial
