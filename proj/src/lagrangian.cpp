#include "indicial/lagrangian.hpp"

#include "indicial/algebra.hpp"
#include "indicial/calculus.hpp"
#include "indicial/error.hpp"
#include "indicial/rules.hpp"

#include <json.hpp>

namespace indicial {

namespace {

std::string derivative_label(const Expression& lagrangian, const Factor& field) {
  std::set<std::string> used = labels(lagrangian);
  for (const auto& s : field.slots) used.insert(s.label);
  for (const char* candidate : {"n", "p", "q", "r", "s", "t", "u", "v"})
    if (!used.contains(candidate)) return candidate;
  return fresh_label(used);
}

}  // namespace

FieldEquation euler_lagrange(const Expression& lagrangian, const Factor& field,
                             const std::vector<std::string>& post_rules, const Context& ctx) {
  if (!free_indices(validate(lagrangian)).empty())
    fail(ErrorCode::NonScalarLagrangian, "the Lagrangian has free indices");
  if (field.is_group() || field.has_derivs())
    fail(ErrorCode::InvalidArgument, "vary with respect to a plain field such as A([m],[])");

  FieldEquation eq;
  auto record = [&eq](std::string label, const Expression& value) {
    eq.trace.push_back({std::move(label), value});
    return value;
  };

  Expression direct = record("dL/d" + field.name, fdiff(lagrangian, field));
  direct = record("contract, canform", canform(contract(direct, ctx), ctx));

  const std::string v = derivative_label(lagrangian, field);
  Factor gradient = field;
  gradient.derivs.push_back({v, DerivKind::Ordinary});
  Expression momentum = record("dL/d" + field.name + "_," + v, fdiff(lagrangian, gradient));
  for (const auto& rule : post_rules) momentum = record("apply1 " + rule, apply1(momentum, rule, ctx));
  momentum = record("expand, contract, canform", canform(contract(expand(momentum, ctx), ctx), ctx));

  Expression lhs = canform(direct - covdiff_inert(momentum, v), ctx);
  if (!direct.is_zero() && direct.terms.front().coeff < 0) lhs = -lhs;
  eq.lhs = record("field equation", lhs);
  return eq;
}

Expression check_conservation(const Expression& lhs, const std::string& index,
                              const std::vector<std::string>& rules, const Context& ctx) {
  if (lhs.is_zero()) return lhs;
  const IndexSet expected{{index, Variance::Upper}};
  if (free_indices(validate(lhs)) != expected)
    fail(ErrorCode::FreeIndexMismatch, "the field equation must carry exactly the free index ^" + index);
  Expression divergence = covdiff_inert(lhs, index);
  for (const auto& rule : rules) divergence = apply1(divergence, rule, ctx);
  return canform(divergence, ctx);
}

Expression check_conservation(const FieldEquation& eq, const std::string& index,
                              const std::vector<std::string>& rules, const Context& ctx) {
  return check_conservation(eq.lhs, index, rules, ctx);
}

std::string render_trace(const FieldEquation& eq, Format format) {
  if (format == Format::Json) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : eq.trace)
      steps.push_back({{"step", s.label}, {"value", nlohmann::json::parse(render(s.value, Format::Json))}});
    return steps.dump(2);
  }
  std::string out;
  for (const auto& s : eq.trace) out += s.label + ": " + render(s.value, format) + "\n";
  return out;
}

}  // namespace indicial
