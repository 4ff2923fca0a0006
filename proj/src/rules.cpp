#include "indicial/rules.hpp"

#include "indicial/algebra.hpp"
#include "indicial/calculus.hpp"
#include "indicial/error.hpp"

#include <algorithm>
#include <functional>

namespace indicial {

void define_components(Context& ctx, const Factor& signature, const Expression& definition) {
  if (signature.is_group() || signature.has_derivs())
    fail(ErrorCode::SignatureMismatch, "component signature must be a plain tensor");
  IndexSet expected;
  for (const auto& s : signature.slots) {
    if (!expected.insert({s.label, s.variance}).second)
      fail(ErrorCode::SignatureMismatch, "repeated index " + s.label + " in the signature of " + signature.name);
  }
  if (!definition.is_zero() && free_indices(validate(definition)) != expected)
    fail(ErrorCode::SignatureMismatch,
         "free indices of the definition do not match the slots of " + signature.name);
  ctx.register_factors(Expression(signature));
  ctx.components[signature.name] = ComponentDefinition{signature, definition};
}

bool remcomps(Context& ctx, const std::string& name) { return ctx.components.erase(name) > 0; }

namespace {

constexpr int kSubstitutionDepth = 64;

const ComponentDefinition* definition_for(const Factor& f, const Context& ctx) {
  if (f.is_group()) return nullptr;
  auto it = ctx.components.find(f.name);
  if (it == ctx.components.end() || it->second.signature.rank() != f.rank()) return nullptr;
  return &it->second;
}

Expression componentize(const Factor& f, const ComponentDefinition& def, std::set<std::string> used,
                        const Context& ctx) {
  Relabeling map;
  std::vector<Factor> metrics;
  for (std::size_t s = 0; s < f.slots.size(); ++s) {
    const Slot& occ = f.slots[s];
    const Slot& sig = def.signature.slots[s];
    if (occ.variance == sig.variance) {
      map[sig.label] = occ.label;
      continue;
    }
    if (!ctx.has_metric())
      fail(ErrorCode::NoMetric, "substituting components of " + f.name + " with other variance needs imetric");
    const std::string c = fresh_label(used);
    used.insert(c);
    map[sig.label] = c;
    metrics.push_back(occ.variance == Variance::Upper ? make_tensor(*ctx.metric.name, {}, {occ.label, c})
                                                      : make_tensor(*ctx.metric.name, {occ.label, c}, {}));
  }
  for (const auto& [from, to] : map) used.insert(to);

  Expression body;
  for (const auto& t : def.definition.terms) body.terms.push_back(freshen_dummies(t, used));
  Expression piece = Expression(Term{1, metrics}) * relabel(body, map);
  for (const auto& d : f.derivs)
    piece = d.kind == DerivKind::Ordinary ? idiff(piece, d.label) : covdiff_inert(piece, d.label);
  return piece;
}

void substitute_term(const Term& t, const Context& ctx, int depth, Expression& out) {
  for (std::size_t k = 0; k < t.factors.size(); ++k) {
    const auto* def = definition_for(t.factors[k], ctx);
    if (!def) continue;
    if (depth >= kSubstitutionDepth)
      fail(ErrorCode::IterationCapExceeded, "component definitions of " + t.factors[k].name + " do not terminate");
    Expression piece = componentize(t.factors[k], *def, labels(t), ctx);
    for (const auto& p : piece.terms) {
      Term next{t.coeff * p.coeff, {}};
      for (std::size_t j = 0; j < t.factors.size(); ++j)
        if (j != k) next.factors.push_back(t.factors[j]);
      next.factors.insert(next.factors.end(), p.factors.begin(), p.factors.end());
      substitute_term(next, ctx, depth + 1, out);
    }
    return;
  }
  out.terms.push_back(t);
}

}  // namespace

Expression substitute_components(const Expression& e, const Context& ctx) {
  if (ctx.components.empty()) return e;
  Expression out;
  for (const auto& t : e.terms) substitute_term(t, ctx, 0, out);
  return out;
}

void matchdeclare(Context& ctx, const std::vector<std::string>& labels) {
  ctx.metavariables.insert(labels.begin(), labels.end());
}

void defrule(Context& ctx, const std::string& name, const Expression& pattern,
             const Expression& replacement) {
  if (pattern.terms.empty() || pattern.terms.size() > 2)
    fail(ErrorCode::InvalidArgument, "rule pattern must have one or two terms");
  validate(pattern);
  validate(replacement);
  RewriteRule rule{name, pattern, replacement, {}};
  for (const auto& l : labels(pattern))
    if (ctx.metavariables.contains(l)) rule.metavariables.insert(l);
  for (const auto& l : labels(replacement))
    if (ctx.metavariables.contains(l) && !rule.metavariables.contains(l))
      fail(ErrorCode::UnboundMetavariable, "metavariable " + l + " does not occur in the pattern of " + name);
  ctx.rules[name] = std::move(rule);
}

namespace {

struct Binding {
  std::map<std::string, std::string> map;
  std::set<std::string> targets;
};

class Matcher {
 public:
  Matcher(const RewriteRule& rule, const SymmetryTable& symmetries)
      : rule_(rule), symmetries_(symmetries) {}

  struct Match {
    Binding binding;
    int sign = 1;
    std::vector<bool> used;
  };

  /// Calls `visit` for each way `pattern` embeds in `target` until it returns true.
  bool each_match(const Term& pattern, const Term& target,
                  const std::function<bool(const Match&)>& visit) const {
    if (pattern.factors.size() > target.factors.size()) return false;
    std::vector<std::vector<SymmetryVariant>> variants;
    for (const auto& f : target.factors) variants.push_back(symmetry_variants(f, symmetries_));
    Match m{{}, 1, std::vector<bool>(target.factors.size(), false)};
    return search(pattern, variants, 0, m, visit);
  }

 private:
  bool search(const Term& pattern, const std::vector<std::vector<SymmetryVariant>>& variants,
              std::size_t i, Match& m, const std::function<bool(const Match&)>& visit) const {
    if (i == pattern.factors.size()) return visit(m);
    for (std::size_t j = 0; j < variants.size(); ++j) {
      if (m.used[j]) continue;
      for (const auto& v : variants[j]) {
        Match next = m;
        if (!factor(pattern.factors[i], v.factor, next.binding)) continue;
        next.used[j] = true;
        next.sign *= v.sign;
        if (search(pattern, variants, i + 1, next, visit)) return true;
      }
    }
    return false;
  }

  bool label(const std::string& p, const std::string& t, Binding& b) const {
    if (!rule_.metavariables.contains(p)) return p == t;
    auto it = b.map.find(p);
    if (it != b.map.end()) return it->second == t;
    if (!b.targets.insert(t).second) return false;
    b.map.emplace(p, t);
    return true;
  }

  bool factor(const Factor& p, const Factor& t, Binding& b) const {
    if (p.name != t.name || p.group.size() != t.group.size() || p.slots.size() != t.slots.size() ||
        p.derivs.size() != t.derivs.size())
      return false;
    for (std::size_t k = 0; k < p.group.size(); ++k)
      if (!factor(p.group[k], t.group[k], b)) return false;
    for (std::size_t k = 0; k < p.slots.size(); ++k)
      if (p.slots[k].variance != t.slots[k].variance || !label(p.slots[k].label, t.slots[k].label, b))
        return false;
    for (std::size_t k = 0; k < p.derivs.size(); ++k)
      if (p.derivs[k].kind != t.derivs[k].kind || !label(p.derivs[k].label, t.derivs[k].label, b))
        return false;
    return true;
  }

  const RewriteRule& rule_;
  const SymmetryTable& symmetries_;
};

// Instantiates a template term: metavariables take their bound labels and
// the template's own dummies move away from `used`.
std::optional<Term> instantiate(const Term& tmpl, const Binding& b, const std::set<std::string>& metavariables,
                                std::set<std::string> used) {
  Relabeling map;
  for (const auto& l : labels(tmpl)) {
    if (metavariables.contains(l)) {
      auto it = b.map.find(l);
      if (it == b.map.end()) return std::nullopt;
      map[l] = it->second;
    }
  }
  for (const auto& [from, to] : map) used.insert(to);
  for (const auto& d : summarize(tmpl).dummies) {
    if (metavariables.contains(d) || !used.contains(d)) continue;
    const std::string fresh = fresh_label(used);
    used.insert(fresh);
    map[d] = fresh;
  }
  return relabel(tmpl, map);
}

std::vector<Factor> rest_of(const Term& t, const std::vector<bool>& used) {
  std::vector<Factor> rest;
  for (std::size_t k = 0; k < t.factors.size(); ++k)
    if (!used[k]) rest.push_back(t.factors[k]);
  return rest;
}

// lambda * binding(replacement) * rest
void emit_replacement(const RewriteRule& rule, const Binding& b, const Rational& lambda,
                      const std::vector<Factor>& rest, const std::set<std::string>& used, Expression& out) {
  for (const auto& r : rule.replacement.terms) {
    auto inst = instantiate(r, b, rule.metavariables, used);
    Term t{lambda * inst->coeff, rest};
    t.factors.insert(t.factors.end(), inst->factors.begin(), inst->factors.end());
    out.terms.push_back(std::move(t));
  }
}

// One rewriting pass; returns the number of rewrites performed.
std::size_t rewrite_pass(const Expression& current, const RewriteRule& rule, const Context& ctx,
                         Expression& out) {
  const Matcher matcher(rule, ctx.symmetries);
  std::size_t rewrites = 0;

  if (rule.pattern.terms.size() == 1) {
    const Term& p = rule.pattern.terms.front();
    for (const auto& t : current.terms) {
      bool fired = matcher.each_match(p, t, [&](const Matcher::Match& m) {
        const Rational lambda = t.coeff * m.sign / p.coeff;
        emit_replacement(rule, m.binding, lambda, rest_of(t, m.used), labels(t), out);
        return true;
      });
      if (fired)
        ++rewrites;
      else
        out.terms.push_back(t);
    }
    return rewrites;
  }

  const Term& p1 = rule.pattern.terms[0];
  const Term& p2 = rule.pattern.terms[1];
  std::vector<std::optional<CanonicalTerm>> canonical;
  for (const auto& t : current.terms) canonical.push_back(canonicalize_term(t, ctx.symmetries));
  std::vector<bool> consumed(current.terms.size(), false);

  for (std::size_t i = 0; i < current.terms.size(); ++i) {
    if (consumed[i]) continue;
    const Term& ti = current.terms[i];
    matcher.each_match(p1, ti, [&](const Matcher::Match& m) {
      const Rational lambda = ti.coeff * m.sign / p1.coeff;
      const auto rest = rest_of(ti, m.used);
      auto partner = instantiate(p2, m.binding, rule.metavariables, labels(ti));
      if (!partner) return false;
      Term expected{lambda * partner->coeff, rest};
      expected.factors.insert(expected.factors.end(), partner->factors.begin(), partner->factors.end());
      const auto target = canonicalize_term(expected, ctx.symmetries);
      if (!target) return false;
      for (std::size_t j = 0; j < current.terms.size(); ++j) {
        if (j == i || consumed[j] || !canonical[j]) continue;
        if (canonical[j]->key != target->key || canonical[j]->term.coeff != target->term.coeff) continue;
        consumed[i] = consumed[j] = true;
        emit_replacement(rule, m.binding, lambda, rest, labels(ti), out);
        ++rewrites;
        return true;
      }
      return false;
    });
  }
  for (std::size_t i = 0; i < current.terms.size(); ++i)
    if (!consumed[i]) out.terms.push_back(current.terms[i]);
  return rewrites;
}

}  // namespace

Expression apply1(const Expression& e, const RewriteRule& rule, const Context& ctx) {
  Expression current = canform(e, ctx);
  std::size_t total = 0;
  bool fired = false;
  for (;;) {
    Expression next;
    const std::size_t n = rewrite_pass(current, rule, ctx, next);
    if (n == 0) break;
    fired = true;
    total += n;
    next = canform(next, ctx);
    if (next == current) break;
    current = std::move(next);
    if (total > kRewriteLimit)
      fail(ErrorCode::IterationCapExceeded, "rule " + rule.name + " did not reach a fixpoint");
  }
  return fired ? current : e;
}

Expression apply1(const Expression& e, const std::string& rule_name, const Context& ctx) {
  auto it = ctx.rules.find(rule_name);
  if (it == ctx.rules.end()) fail(ErrorCode::InvalidArgument, "no rule named " + rule_name);
  return apply1(e, it->second, ctx);
}

}  // namespace indicial
