#pragma once

#include "indicial/context.hpp"
#include "indicial/expr.hpp"
#include "indicial/printer.hpp"

#include <string>
#include <vector>

namespace indicial {

struct TraceStep {
  std::string label;
  Expression value;
};

/// `lhs = 0`, together with the intermediate results that produced it.
struct FieldEquation {
  Expression lhs;
  std::vector<TraceStep> trace;
};

/// dL/dfield - 'covdiff(dL/d(field_{,v}), v) in canonical form, where
/// `post_rules` are applied to the derivative term before it is expanded
/// and contracted. When the first term is non-zero its leading coefficient
/// is made positive.
FieldEquation euler_lagrange(const Expression& lagrangian, const Factor& field,
                             const std::vector<std::string>& post_rules, const Context& ctx);

/// Divergence of the field equation over `index`, with `rules` applied.
Expression check_conservation(const FieldEquation& eq, const std::string& index,
                              const std::vector<std::string>& rules, const Context& ctx);
Expression check_conservation(const Expression& lhs, const std::string& index,
                              const std::vector<std::string>& rules, const Context& ctx);

/// One line per step (`label: expression`) or a JSON array.
std::string render_trace(const FieldEquation& eq, Format format);

}  // namespace indicial
