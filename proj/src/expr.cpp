#include "indicial/expr.hpp"

#include "indicial/error.hpp"

#include <algorithm>
#include <utility>

namespace indicial {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TripleIndex: return "TripleIndex";
    case ErrorCode::VarianceClash: return "VarianceClash";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::MixedFreeIndices: return "MixedFreeIndices";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::ConflictingDeclaration: return "ConflictingDeclaration";
    case ErrorCode::NoMetric: return "NoMetric";
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::PatternIndexCollision: return "PatternIndexCollision";
    case ErrorCode::UnboundMetavariable: return "UnboundMetavariable";
    case ErrorCode::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::NonScalarLagrangian: return "NonScalarLagrangian";
    case ErrorCode::FreeIndexMismatch: return "FreeIndexMismatch";
    case ErrorCode::UnboundName: return "UnboundName";
    case ErrorCode::InertOperatorPresent: return "InertOperatorPresent";
    case ErrorCode::CanonicalizationLimit: return "CanonicalizationLimit";
    case ErrorCode::HistoryOutOfRange: return "HistoryOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

bool Factor::has_covariant_derivs() const {
  return std::any_of(derivs.begin(), derivs.end(),
                     [](const DerivSlot& d) { return d.kind == DerivKind::Covariant; });
}

std::vector<std::string> Factor::cov() const {
  std::vector<std::string> out;
  for (const auto& s : slots)
    if (s.variance == Variance::Lower) out.push_back(s.label);
  return out;
}

std::vector<std::string> Factor::contra() const {
  std::vector<std::string> out;
  for (const auto& s : slots)
    if (s.variance == Variance::Upper) out.push_back(s.label);
  return out;
}

Expression::Expression(Term t) {
  if (t.coeff.numerator() != 0) terms.push_back(std::move(t));
}

Expression::Expression(Factor f) { terms.push_back(Term{Rational(1), {std::move(f)}}); }

Expression::Expression(Rational r) {
  if (r.numerator() != 0) terms.push_back(Term{r, {}});
}

Factor make_tensor(std::string name, const std::vector<std::string>& cov,
                   const std::vector<std::string>& contra,
                   const std::vector<std::string>& ordinary_derivs) {
  Factor f;
  f.name = std::move(name);
  for (const auto& c : cov) f.slots.push_back({c, Variance::Lower});
  for (const auto& c : contra) f.slots.push_back({c, Variance::Upper});
  for (const auto& d : ordinary_derivs) f.derivs.push_back({d, DerivKind::Ordinary});
  return f;
}

Factor make_kdelta(std::string upper, std::string lower) {
  return make_tensor(std::string(kKroneckerName), {std::move(lower)}, {std::move(upper)});
}

Expression operator+(const Expression& a, const Expression& b) {
  Expression out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

Expression operator-(const Expression& a) { return Rational(-1) * a; }

Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

Expression operator*(const Rational& r, const Expression& e) {
  if (r.numerator() == 0) return {};
  Expression out = e;
  for (auto& t : out.terms) t.coeff *= r;
  return out;
}

Term multiply(const Term& a, const Term& b) {
  // Only summation labels shared by both sides are renamed; a dummy that
  // meets a free label is a genuine repeated index and is left for
  // validation to report.
  const auto right_dummies = summarize(b).dummies;
  std::set<std::string> used = labels(a);
  used.merge(labels(b));
  Relabeling map;
  for (const auto& d : summarize(a).dummies) {
    if (std::find(right_dummies.begin(), right_dummies.end(), d) == right_dummies.end()) continue;
    auto fresh = fresh_label(used);
    used.insert(fresh);
    map[d] = fresh;
  }
  Term left = map.empty() ? a : relabel(a, map);
  left.coeff *= b.coeff;
  left.factors.insert(left.factors.end(), b.factors.begin(), b.factors.end());
  return left;
}

Expression operator*(const Expression& a, const Expression& b) {
  Expression out;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      Term t = multiply(ta, tb);
      if (t.coeff.numerator() != 0) out.terms.push_back(std::move(t));
    }
  return out;
}

namespace {

void collect_occurrences(const Factor& f, std::vector<IndexRef>& out) {
  for (const auto& s : f.slots) out.push_back({s.label, s.variance});
  for (const auto& g : f.group) collect_occurrences(g, out);
  for (const auto& d : f.derivs) out.push_back({d.label, Variance::Lower});
}

void check_arity(const Factor& f, ArityTable& local, const ArityTable* global) {
  if (f.is_group()) {
    for (const auto& g : f.group) check_arity(g, local, global);
    return;
  }
  if (global) {
    auto it = global->find(f.name);
    if (it != global->end() && it->second != f.rank())
      fail(ErrorCode::ArityMismatch, f.name + " used with " + std::to_string(f.rank()) +
                                         " indices, declared with " + std::to_string(it->second));
  }
  auto [it, inserted] = local.emplace(f.name, f.rank());
  if (!inserted && it->second != f.rank())
    fail(ErrorCode::ArityMismatch, f.name + " used with inconsistent numbers of indices");
}

}  // namespace

std::vector<IndexRef> occurrences(const Factor& f) {
  std::vector<IndexRef> out;
  collect_occurrences(f, out);
  return out;
}

std::vector<IndexRef> occurrences(const Term& t) {
  std::vector<IndexRef> out;
  for (const auto& f : t.factors) collect_occurrences(f, out);
  return out;
}

IndexSummary summarize(const Term& t) {
  auto occ = occurrences(t);
  std::map<std::string, int> count;
  for (const auto& o : occ) ++count[o.label];
  IndexSummary s;
  std::set<std::string> seen;
  for (const auto& o : occ) {
    if (!seen.insert(o.label).second) continue;
    if (count[o.label] == 1)
      s.free.push_back(o);
    else
      s.dummies.push_back(o.label);
  }
  return s;
}

std::set<std::string> labels(const Term& t) {
  std::set<std::string> out;
  for (const auto& o : occurrences(t)) out.insert(o.label);
  return out;
}

std::set<std::string> labels(const Expression& e) {
  std::set<std::string> out;
  for (const auto& t : e.terms) out.merge(labels(t));
  return out;
}

bool is_generated_label(std::string_view label) {
  return !label.empty() && label.front() == '%';
}

std::string generated_label(int n) { return "%" + std::to_string(n); }

std::string fresh_label(const std::set<std::string>& used) {
  for (int k = 1;; ++k) {
    auto candidate = generated_label(k);
    if (!used.contains(candidate)) return candidate;
  }
}

const Term& validate(const Term& t, const ArityTable* arities) {
  std::map<std::string, std::vector<Variance>> seen;
  for (const auto& o : occurrences(t)) seen[o.label].push_back(o.variance);
  for (const auto& [label, vs] : seen) {
    if (vs.size() >= 3)
      fail(ErrorCode::TripleIndex, "index " + label + " appears " + std::to_string(vs.size()) +
                                       " times in one term");
    if (vs.size() == 2 && vs[0] == vs[1])
      fail(ErrorCode::VarianceClash,
           "index " + label + " repeated in the same " +
               (vs[0] == Variance::Upper ? "upper" : "lower") + " position");
  }
  ArityTable local;
  for (const auto& f : t.factors) check_arity(f, local, arities);
  return t;
}

IndexSet free_indices(const Term& t) {
  IndexSet out;
  for (const auto& f : summarize(t).free) out.insert(f);
  return out;
}

const Expression& validate(const Expression& e, const ArityTable* arities) {
  for (const auto& t : e.terms) validate(t, arities);
  free_indices(e);
  return e;
}

IndexSet free_indices(const Expression& e) {
  if (e.terms.empty()) return {};
  IndexSet first = free_indices(e.terms.front());
  for (std::size_t i = 1; i < e.terms.size(); ++i) {
    if (free_indices(e.terms[i]) != first)
      fail(ErrorCode::MixedFreeIndices, "terms of a sum carry different free indices");
  }
  return first;
}

Factor relabel(const Factor& f, const Relabeling& map) {
  auto sub = [&](const std::string& l) {
    auto it = map.find(l);
    return it == map.end() ? l : it->second;
  };
  Factor out = f;
  for (auto& s : out.slots) s.label = sub(s.label);
  for (auto& d : out.derivs) d.label = sub(d.label);
  for (auto& g : out.group) g = relabel(g, map);
  return out;
}

Term relabel(const Term& t, const Relabeling& map) {
  Term out = t;
  for (auto& f : out.factors) f = relabel(f, map);
  return out;
}

Expression relabel(const Expression& e, const Relabeling& map) {
  Expression out = e;
  for (auto& t : out.terms) t = relabel(t, map);
  return out;
}

Term rename_dummies(const Term& t) {
  auto s = summarize(t);
  std::set<std::string> reserved;
  for (const auto& f : s.free) reserved.insert(f.label);
  Relabeling map;
  int counter = 0;
  for (const auto& d : s.dummies) {
    std::string label;
    do label = generated_label(++counter);
    while (reserved.contains(label));
    map[d] = label;
  }
  return relabel(t, map);
}

Expression rename_dummies(const Expression& e) {
  Expression out;
  for (const auto& t : e.terms) out.terms.push_back(rename_dummies(t));
  return out;
}

Term freshen_dummies(const Term& t, const std::set<std::string>& avoid) {
  auto s = summarize(t);
  std::set<std::string> used = labels(t);
  used.insert(avoid.begin(), avoid.end());
  Relabeling map;
  for (const auto& d : s.dummies) {
    if (!avoid.contains(d)) continue;
    auto fresh = fresh_label(used);
    used.insert(fresh);
    map[d] = fresh;
  }
  return map.empty() ? t : relabel(t, map);
}

}  // namespace indicial
