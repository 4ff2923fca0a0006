#include "indicial/session.hpp"

#include "indicial/algebra.hpp"
#include "indicial/calculus.hpp"
#include "indicial/error.hpp"
#include "indicial/lagrangian.hpp"
#include "indicial/rules.hpp"

#include <iostream>
#include <sstream>

namespace indicial {

namespace {

Value word(std::string w) { return Value{{}, std::move(w)}; }
Value done() { return word("done"); }

std::string where(const Node& n) {
  return "line " + std::to_string(n.line) + ", column " + std::to_string(n.column);
}

const std::string& label_of(const Node& n) {
  if (n.kind != NodeKind::Symbol) fail(ErrorCode::InvalidArgument, "expected a name at " + where(n));
  return n.text;
}

std::int64_t integer_of(const Node& n) {
  if (n.kind != NodeKind::Number || n.number.denominator() != 1)
    fail(ErrorCode::InvalidArgument, "expected an integer at " + where(n));
  return n.number.numerator();
}

void arity(const Node& call, std::size_t min, std::size_t max) {
  if (call.args.size() < min || call.args.size() > max)
    fail(ErrorCode::InvalidArgument, call.text + " takes " +
                                         (min == max ? std::to_string(min)
                                                     : std::to_string(min) + " to " + std::to_string(max)) +
                                         " arguments (" + where(call) + ")");
}

std::vector<std::string> names_in_list(const Node& list) {
  if (list.kind != NodeKind::List) fail(ErrorCode::InvalidArgument, "expected a list at " + where(list));
  std::vector<std::string> out;
  for (const auto& item : list.args) out.push_back(label_of(*item));
  return out;
}

std::vector<BlockSpec> symmetry_blocks(const Node& list) {
  if (list.kind != NodeKind::List) fail(ErrorCode::InvalidArgument, "decsym expects lists of sym/anti blocks");
  std::vector<BlockSpec> out;
  for (const auto& item : list.args) {
    if (item->kind != NodeKind::Call || (item->text != "sym" && item->text != "anti"))
      fail(ErrorCode::InvalidArgument, "decsym blocks are sym(...) or anti(...) at " + where(*item));
    BlockSpec b;
    b.kind = item->text == "anti" ? BlockKind::Antisymmetric : BlockKind::Symmetric;
    for (const auto& p : item->args) {
      if (p->kind == NodeKind::Symbol && p->text == "all")
        b.all = true;
      else
        b.positions.push_back(static_cast<std::size_t>(integer_of(*p)));
    }
    out.push_back(std::move(b));
  }
  return out;
}

// Recognizes lambda([x], 'covdiff(x, i, ...)) and returns the labels.
std::vector<std::string> covdiff_lambda(const Node& fn) {
  auto unsupported = [&] {
    fail(ErrorCode::InvalidArgument,
         "map supports only lambda([x],'covdiff(x,i)) (" + where(fn) + ")");
  };
  if (fn.kind != NodeKind::Call || fn.text != "lambda" || fn.args.size() != 2) unsupported();
  const Node& params = *fn.args[0];
  if (params.kind != NodeKind::List || params.args.size() != 1) unsupported();
  const std::string& x = label_of(*params.args[0]);
  const Node& body = *fn.args[1];
  if (body.kind != NodeKind::Quote || body.text != "covdiff") unsupported();
  const Node& inner = *body.args[0];
  if (inner.args.size() < 2 || inner.args[0]->kind != NodeKind::Symbol || inner.args[0]->text != x)
    unsupported();
  std::vector<std::string> out;
  for (std::size_t k = 1; k < inner.args.size(); ++k) out.push_back(label_of(*inner.args[k]));
  return out;
}

Expression inert_derivatives(Expression e, const std::vector<std::string>& indices) {
  for (const auto& i : indices) e = covdiff_inert(e, i);
  return e;
}

}  // namespace

Session::Session(SessionOptions options) : options_(options) {}

const Value* Session::variable(const std::string& name) const {
  auto it = variables_.find(name);
  return it == variables_.end() ? nullptr : &it->second;
}

std::string Session::show(const Value& v) const {
  return v.is_expression() ? render(v.expr, options_.format) : v.word;
}

Value Session::history_entry(std::int64_t back, const Node& at) const {
  if (back < 1 || static_cast<std::size_t>(back) > history_.size())
    fail(ErrorCode::HistoryOutOfRange, "%th(" + std::to_string(back) + ") at " + where(at) + " but only " +
                                           std::to_string(history_.size()) + " results exist");
  return history_[history_.size() - static_cast<std::size_t>(back)];
}

Expression Session::expression_of(const Node& node) {
  Value v = evaluate(node);
  if (!v.is_expression())
    fail(ErrorCode::InvalidArgument, "'" + v.word + "' is not an expression (" + where(node) + ")");
  return std::move(v.expr);
}

Value Session::evaluate(const Node& node) {
  switch (node.kind) {
    case NodeKind::Number:
      return Value{Expression(node.number), {}};
    case NodeKind::Symbol: {
      if (const Value* v = variable(node.text)) return *v;
      if (node.text == "quit") {
        quit_ = true;
        return word("quit");
      }
      Expression e = to_expression(node);
      ctx_.register_factors(e);
      return Value{substitute_components(e, ctx_), {}};
    }
    case NodeKind::Indexed: {
      Expression e(node.factor);
      ctx_.register_factors(e);
      return Value{substitute_components(e, ctx_), {}};
    }
    case NodeKind::Group: {
      Expression e = expression_of(*node.args[0]);
      for (const auto& d : node.factor.derivs)
        e = d.kind == DerivKind::Covariant ? covdiff_inert(e, d.label) : idiff(e, d.label);
      return Value{std::move(e), {}};
    }
    case NodeKind::Unary:
      return Value{-expression_of(*node.args[0]), {}};
    case NodeKind::Binary: {
      Expression l = expression_of(*node.args[0]);
      Expression r = expression_of(*node.args[1]);
      if (node.text == "+") return Value{l + r, {}};
      if (node.text == "-" || node.text == "=") return Value{l - r, {}};
      if (node.text == "*") return Value{l * r, {}};
      const bool number = r.terms.size() == 1 && r.terms[0].factors.empty();
      if (node.text == "/") {
        if (!number) fail(ErrorCode::InvalidArgument, "division is only by nonzero numbers (" + where(node) + ")");
        return Value{(Rational(1) / r.terms[0].coeff) * l, {}};
      }
      if (node.text == "^") {
        const Rational k = r.is_zero() ? Rational(0) : r.terms[0].coeff;
        if ((!r.is_zero() && !number) || k.denominator() != 1 || k < 0)
          fail(ErrorCode::InvalidArgument, "only non-negative integer powers are supported (" + where(node) + ")");
        Expression out{Rational(1)};
        for (std::int64_t i = 0; i < k.numerator(); ++i) out = out * l;
        return Value{std::move(out), {}};
      }
      break;
    }
    case NodeKind::Quote: {
      const Node& inner = *node.args[0];
      if (inner.text != "covdiff" || inner.args.size() < 2)
        fail(ErrorCode::InvalidArgument, "only 'covdiff(expr, index) may be quoted (" + where(node) + ")");
      Expression e = expression_of(*inner.args[0]);
      for (std::size_t k = 1; k < inner.args.size(); ++k) e = covdiff_inert(e, label_of(*inner.args[k]));
      return Value{std::move(e), {}};
    }
    case NodeKind::History:
      return history_entry(node.number.numerator(), node);
    case NodeKind::List:
      fail(ErrorCode::InvalidArgument, "a list is not an expression (" + where(node) + ")");
    case NodeKind::Call:
      return call(node);
  }
  fail(ErrorCode::InvalidArgument, "cannot evaluate '" + node.text + "' (" + where(node) + ")");
}

Value Session::call(const Node& node) {
  const std::string& f = node.text;
  const auto& args = node.args;
  auto expr = [&](std::size_t k) { return expression_of(*args.at(k)); };
  auto value = [](Expression e) { return Value{std::move(e), {}}; };

  if (f == "load") return args.empty() ? done() : word(args[0]->text);
  if (f == "imetric") {
    arity(node, 1, 1);
    ctx_.set_metric(label_of(*args[0]));
    return done();
  }
  if (f == "idim") {
    arity(node, 1, 1);
    const auto n = integer_of(*args[0]);
    if (n < 1) fail(ErrorCode::InvalidArgument, "idim needs a positive dimension");
    ctx_.metric.dimension = n;
    return done();
  }
  if (f == "decsym") {
    arity(node, 5, 5);
    const auto cov = integer_of(*args[1]);
    const auto contra = integer_of(*args[2]);
    if (cov < 0 || contra < 0) fail(ErrorCode::InvalidArgument, "decsym arities must be non-negative");
    std::string warning = decsym(ctx_, label_of(*args[0]), static_cast<std::size_t>(cov),
                                 static_cast<std::size_t>(contra), symmetry_blocks(*args[3]),
                                 symmetry_blocks(*args[4]));
    if (!warning.empty()) pending_.push_back(std::move(warning));
    return done();
  }
  if (f == "components") {
    arity(node, 2, 2);
    define_components(ctx_, to_factor(*args[0]), expr(1));
    return done();
  }
  if (f == "remcomps") {
    arity(node, 1, 1);
    remcomps(ctx_, label_of(*args[0]));
    return done();
  }
  if (f == "matchdeclare") {
    std::vector<std::string> labels;
    const bool pairs = args.size() % 2 == 0 && [&] {
      for (std::size_t k = 1; k < args.size(); k += 2)
        if (args[k]->kind != NodeKind::Symbol || (args[k]->text != "atom" && args[k]->text != "true"))
          return false;
      return true;
    }();
    for (std::size_t k = 0; k < args.size(); k += pairs ? 2 : 1) labels.push_back(label_of(*args[k]));
    matchdeclare(ctx_, labels);
    return done();
  }
  if (f == "defrule") {
    arity(node, 3, 3);
    const std::string& name = label_of(*args[0]);
    defrule(ctx_, name, expr(1), expr(2));
    return word(name);
  }
  if (f == "apply") {
    arity(node, 2, 2);
    const std::string& target = label_of(*args[0]);
    if (!is_known_function(target)) fail(ErrorCode::UnknownCommand, "unknown function " + target);
    if (args[1]->kind != NodeKind::List) fail(ErrorCode::InvalidArgument, "apply expects an argument list");
    Node forwarded = *args[1];
    forwarded.kind = NodeKind::Call;
    forwarded.text = target;
    return call(forwarded);
  }
  if (f == "apply1") {
    if (args.size() < 2) arity(node, 2, 2);
    Expression e = expr(0);
    for (std::size_t k = 1; k < args.size(); ++k) e = apply1(e, label_of(*args[k]), ctx_);
    return value(std::move(e));
  }
  if (f == "ishow") {
    arity(node, 1, 1);
    Value v = evaluate(*args[0]);
    if (v.is_expression()) free_indices(validate(v.expr, &ctx_.arities));
    history_.push_back(v);
    pending_.push_back("(%t" + std::to_string(line_) + ") " + show(v));
    return v;
  }
  if (f == "canform") return arity(node, 1, 1), value(canform(expr(0), ctx_));
  if (f == "contract") return arity(node, 1, 1), value(contract(expr(0), ctx_));
  if (f == "expand") return arity(node, 1, 1), value(expand(expr(0), ctx_));
  if (f == "rename") return arity(node, 1, 1), value(rename_dummies(expr(0)));
  if (f == "lhs" || f == "ev") {
    if (f == "lhs") arity(node, 1, 1);
    if (args.empty()) arity(node, 1, 1);
    return value(expr(0));
  }
  if (f == "diff") {
    if (args.size() < 2) arity(node, 2, 2);
    Expression e = expr(0);
    for (std::size_t k = 1; k < args.size(); ++k) e = fdiff(e, to_factor(*args[k]));
    return value(std::move(e));
  }
  if (f == "idiff") {
    if (args.size() < 2) arity(node, 2, 2);
    Expression e = expr(0);
    for (std::size_t k = 1; k < args.size(); ++k) e = idiff(e, label_of(*args[k]));
    return value(std::move(e));
  }
  if (f == "covdiff") {
    if (args.size() < 2) arity(node, 2, 2);
    Expression e = expr(0);
    for (std::size_t k = 1; k < args.size(); ++k)
      e = covdiff(e, label_of(*args[k]), CovdiffMode::Expanded, ctx_);
    return value(std::move(e));
  }
  if (f == "extdiff") {
    arity(node, 2, 2);
    return value(extdiff(expr(0), label_of(*args[1]), ctx_));
  }
  if (f == "christoffel") {
    arity(node, 3, 3);
    return value(christoffel(label_of(*args[0]), label_of(*args[1]), label_of(*args[2]), ctx_));
  }
  if (f == "map") {
    arity(node, 2, 2);
    return value(inert_derivatives(expr(1), covdiff_lambda(*args[0])));
  }
  if (f == "mapcovdiff") {
    if (args.size() < 2) arity(node, 2, 2);
    std::vector<std::string> indices;
    for (std::size_t k = 1; k < args.size(); ++k) indices.push_back(label_of(*args[k]));
    return value(inert_derivatives(expr(0), indices));
  }
  if (f == "%th") {
    arity(node, 1, 1);
    return history_entry(integer_of(*args[0]), node);
  }
  if (f == "euler_lagrange") {
    arity(node, 2, 3);
    std::vector<std::string> rules;
    if (args.size() == 3) rules = names_in_list(*args[2]);
    FieldEquation eq = euler_lagrange(expr(0), to_factor(*args[1]), rules, ctx_);
    if (options_.trace) {
      std::istringstream lines(render_trace(eq, options_.format));
      for (std::string l; std::getline(lines, l);) pending_.push_back(l);
    }
    return value(std::move(eq.lhs));
  }
  if (f == "conservation") {
    arity(node, 2, 3);
    std::vector<std::string> rules;
    if (args.size() == 3) rules = names_in_list(*args[2]);
    return value(check_conservation(expr(0), label_of(*args[1]), rules, ctx_));
  }
  if (f == "kill") {
    for (const auto& a : args) {
      const std::string& name = label_of(*a);
      if (name == "all") {
        variables_.clear();
        ctx_.rules.clear();
        ctx_.components.clear();
      } else {
        variables_.erase(name);
        ctx_.rules.erase(name);
      }
    }
    return done();
  }
  if (f == "quit") {
    quit_ = true;
    return word("quit");
  }
  if (f == "lambda") fail(ErrorCode::InvalidArgument, "lambda is only supported inside map (" + where(node) + ")");
  if (f == "sym" || f == "anti")
    fail(ErrorCode::InvalidArgument, f + " is only meaningful inside decsym (" + where(node) + ")");
  fail(ErrorCode::UnknownCommand, "unknown function " + f + " (" + where(node) + ")");
}

void Session::execute(const Statement& st, std::ostream& out) {
  ++line_;
  pending_.clear();
  auto flush = [&] {
    for (const auto& l : pending_) out << l << '\n';
    pending_.clear();
  };

  Value v;
  try {
    if (st.kind == StatementKind::Assignment && st.name == "igeowedge_flag") {
      const std::string& flag = label_of(*st.node);
      if (flag != "true" && flag != "false")
        fail(ErrorCode::InvalidArgument, "igeowedge_flag must be true or false");
      ctx_.geowedge = flag == "true";
      v = word(flag);
    } else {
      v = evaluate(*st.node);
      if (v.is_expression()) free_indices(validate(v.expr, &ctx_.arities));
      if (st.kind == StatementKind::Assignment) variables_[st.name] = v;
    }
  } catch (...) {
    flush();
    throw;
  }
  flush();
  if (quit_) return;
  history_.push_back(v);
  if (st.echo) out << "(%o" << line_ << ") " << show(v) << '\n';
}

int Session::run_script(std::string_view text, std::ostream& out, std::ostream& err) {
  std::vector<Statement> program;
  try {
    program = parse_program(text);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_parse_error() ? 1 : 2;
  }
  for (std::size_t k = 0; k < program.size(); ++k) {
    try {
      execute(program[k], out);
    } catch (const Error& e) {
      err << "error in statement " << k + 1 << " (line " << program[k].line << "): " << e.what() << '\n';
      return e.is_parse_error() ? 1 : 2;
    } catch (const std::exception& e) {
      err << "error in statement " << k + 1 << " (line " << program[k].line << "): " << e.what() << '\n';
      return 2;
    }
    if (quit_) break;
  }
  return 0;
}

void Session::repl(std::istream& in, std::ostream& out, bool prompts) {
  std::string buffer;
  auto prompt = [&] {
    if (prompts) out << "(%i" << line_ + 1 << ") " << std::flush;
  };
  prompt();
  for (std::string line; !quit_ && std::getline(in, line);) {
    buffer += line;
    buffer += '\n';
    const auto last = buffer.find_last_not_of(" \t\r\n");
    if (last == std::string::npos) {
      buffer.clear();
      prompt();
      continue;
    }
    if (buffer[last] != ';' && buffer[last] != '$') continue;
    try {
      for (const auto& st : parse_program(buffer)) {
        try {
          execute(st, out);
        } catch (const std::exception& e) {
          out << "error: " << e.what() << '\n';
        }
        if (quit_) break;
      }
    } catch (const std::exception& e) {
      out << "error: " << e.what() << '\n';
    }
    buffer.clear();
    if (!quit_) prompt();
  }
}

Value Session::eval(std::string_view text) {
  std::ostringstream sink;
  for (const auto& st : parse_program(text)) execute(st, sink);
  if (history_.empty()) return done();
  return history_.back();
}

}  // namespace indicial
