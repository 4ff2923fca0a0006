#pragma once

#include "indicial/context.hpp"
#include "indicial/expr.hpp"
#include "indicial/parser.hpp"
#include "indicial/printer.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace indicial {

struct SessionOptions {
  Format format = Format::Plain;
  /// Print the Euler-Lagrange derivation steps after euler_lagrange(...).
  bool trace = false;
};

/// Result of evaluating a statement: an expression or a plain word such as
/// `done` or a rule name.
struct Value {
  Expression expr;
  std::string word;

  bool is_expression() const { return word.empty(); }
};

/// Interpreter state: the algebraic context plus variable bindings and the
/// output history behind `%` and `%th(n)`. Display lines produced by ishow
/// (`%t`) and statement results (`%o`) both enter the history.
class Session {
 public:
  explicit Session(SessionOptions options = {});

  Context& context() { return ctx_; }
  const Context& context() const { return ctx_; }

  /// Runs one statement and writes its transcript lines to `out`.
  /// Errors propagate as indicial::Error; the session stays usable.
  void execute(const Statement& st, std::ostream& out);

  /// Parses and runs a whole program. Returns the exit status:
  /// 0 success, 1 parse error, 2 validation or semantic error. The
  /// diagnostic goes to `err`.
  int run_script(std::string_view text, std::ostream& out, std::ostream& err);

  /// Reads statements from `in` until `quit;` or end of input.
  void repl(std::istream& in, std::ostream& out, bool prompts = true);

  /// Convenience for tests: runs `text` (one or more statements) and
  /// returns the value of the last one.
  Value eval(std::string_view text);

  const std::vector<Value>& history() const { return history_; }
  const Value* variable(const std::string& name) const;
  bool quit_requested() const { return quit_; }

 private:
  Value evaluate(const Node& node);
  Value call(const Node& node);
  Expression expression_of(const Node& node);
  Value history_entry(std::int64_t back, const Node& at) const;
  std::string show(const Value& v) const;

  SessionOptions options_;
  Context ctx_;
  std::map<std::string, Value> variables_;
  std::vector<Value> history_;
  std::vector<std::string> pending_;  // display lines of the running statement
  int line_ = 0;
  bool quit_ = false;
};

}  // namespace indicial
