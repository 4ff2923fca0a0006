#include "indicial/calculus.hpp"

#include "indicial/algebra.hpp"
#include "indicial/error.hpp"

#include <algorithm>
#include <numeric>

namespace indicial {

namespace {

bool is_constant(const Factor& f) {
  return !f.is_group() && (f.name == kKroneckerName || (f.name == kDimensionName && f.rank() == 0));
}

Term without_dummy(const Term& t, const std::string& label) {
  auto s = summarize(t);
  if (std::find(s.dummies.begin(), s.dummies.end(), label) == s.dummies.end()) return t;
  return freshen_dummies(t, {label});
}

Factor ichr2(const std::string& i, const std::string& j, const std::string& k) {
  return make_tensor(std::string(kChristoffelName), {i, j}, {k});
}

}  // namespace

Expression idiff(const Expression& e, const std::string& index) {
  Expression out;
  for (const auto& original : e.terms) {
    Term t = without_dummy(original, index);
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      if (is_constant(t.factors[k])) continue;
      Term d = t;
      d.factors[k].derivs.push_back({index, DerivKind::Ordinary});
      out.terms.push_back(validate(d));
    }
  }
  return out;
}

Expression christoffel(const std::string& i, const std::string& j, const std::string& k,
                       const Context& ctx, const std::set<std::string>& avoid) {
  if (!ctx.has_metric()) fail(ErrorCode::NoMetric, "christoffel symbols need imetric");
  const std::string& g = *ctx.metric.name;
  std::set<std::string> used = avoid;
  used.insert({i, j, k});
  const std::string s = fresh_label(used);
  Expression inverse(make_tensor(g, {}, {k, s}));
  Expression sum = Expression(make_tensor(g, {i, s}, {}, {j})) +
                   Expression(make_tensor(g, {j, s}, {}, {i})) -
                   Expression(make_tensor(g, {i, j}, {}, {s}));
  return Rational(1, 2) * (inverse * sum);
}

Expression covdiff_inert(const Expression& e, const std::string& index) {
  Expression out;
  for (const auto& original : e.terms) {
    if (original.factors.empty()) continue;
    Term t = without_dummy(original, index);
    if (t.factors.size() == 1) {
      t.factors.front().derivs.push_back({index, DerivKind::Covariant});
    } else {
      Factor g;
      g.group = std::move(t.factors);
      g.derivs.push_back({index, DerivKind::Covariant});
      t.factors = {std::move(g)};
    }
    out.terms.push_back(validate(t));
  }
  return out;
}

Expression covdiff(const Expression& e, const std::string& index, CovdiffMode mode,
                   const Context& ctx) {
  if (mode == CovdiffMode::Inert) return covdiff_inert(e, index);
  if (!ctx.has_metric()) fail(ErrorCode::NoMetric, "expanded covdiff needs imetric");

  Expression out;
  for (const auto& original : e.terms) {
    Term t = without_dummy(original, index);
    std::set<std::string> used = labels(t);
    used.insert(index);
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      const Factor& f = t.factors[k];
      if (is_constant(f)) continue;
      if (f.is_group())
        fail(ErrorCode::InvalidArgument, "cannot expand the covariant derivative of an inert product");
      Term partial = t;
      partial.factors[k].derivs.push_back({index, DerivKind::Ordinary});
      out.terms.push_back(std::move(partial));

      auto connection = [&](Factor replaced, Factor gamma, int sign) {
        Term c = t;
        c.coeff *= sign;
        c.factors[k] = std::move(replaced);
        c.factors.push_back(std::move(gamma));
        out.terms.push_back(validate(c));
      };
      for (std::size_t s = 0; s < f.slots.size(); ++s) {
        const std::string d = fresh_label(used);
        Factor replaced = f;
        replaced.slots[s].label = d;
        const std::string& a = f.slots[s].label;
        if (f.slots[s].variance == Variance::Upper)
          connection(replaced, ichr2(index, d, a), +1);
        else
          connection(replaced, ichr2(index, a, d), -1);
      }
      for (std::size_t s = 0; s < f.derivs.size(); ++s) {
        const std::string d = fresh_label(used);
        Factor replaced = f;
        replaced.derivs[s].label = d;
        connection(replaced, ichr2(index, f.derivs[s].label, d), -1);
      }
    }
  }
  return out;
}

Expression expand_christoffels(const Expression& e, const Context& ctx) {
  Expression out;
  for (const auto& t : e.terms) {
    Expression acc(Term{t.coeff, {}});
    std::set<std::string> used = labels(t);
    for (const auto& f : t.factors) {
      const bool is_gamma = !f.is_group() && f.name == kChristoffelName && f.rank() == 3 &&
                            !f.has_derivs() && f.slots[0].variance == Variance::Lower &&
                            f.slots[1].variance == Variance::Lower &&
                            f.slots[2].variance == Variance::Upper;
      Expression piece = is_gamma ? christoffel(f.slots[0].label, f.slots[1].label,
                                                f.slots[2].label, ctx, used)
                                  : Expression(f);
      used.merge(labels(piece));
      acc = acc * piece;
    }
    out = out + acc;
  }
  return out;
}

Expression extdiff(const Expression& e, const std::string& index, const Context& ctx) {
  const IndexSet free = free_indices(validate(e));
  std::vector<std::string> form;
  for (const auto& f : free) {
    if (f.variance != Variance::Lower)
      fail(ErrorCode::NotAntisymmetric, "extdiff needs a form with lower free indices, got upper " + f.label);
    if (f.label == index)
      fail(ErrorCode::InvalidArgument, "extdiff index " + index + " is already a free index");
    form.push_back(f.label);
  }
  std::sort(form.begin(), form.end());

  for (std::size_t r = 0; r + 1 < form.size(); ++r) {
    Expression swapped = relabel(e, {{form[r], form[r + 1]}, {form[r + 1], form[r]}});
    if (!canform(e + swapped, ctx).is_zero())
      fail(ErrorCode::NotAntisymmetric,
           "argument of extdiff is not antisymmetric in " + form[r] + " and " + form[r + 1]);
  }

  Expression base;
  for (const auto& t : e.terms) base.terms.push_back(freshen_dummies(t, {index}));

  std::vector<std::string> all = form;
  all.push_back(index);
  Expression result;
  for (std::size_t j = 0; j < all.size(); ++j) {
    std::vector<std::string> rest = all;
    rest.erase(rest.begin() + j);
    Relabeling map;
    for (std::size_t r = 0; r < form.size(); ++r) map[form[r]] = rest[r];
    Expression piece = idiff(relabel(base, map), all[j]);
    result = result + (j % 2 == 0 ? piece : -piece);
  }
  if (!ctx.geowedge) result = Rational(1, static_cast<std::int64_t>(all.size())) * result;
  return canform(result, ctx);
}

Expression fdiff(const Expression& e, const Factor& target) {
  if (target.is_group() || target.has_covariant_derivs())
    fail(ErrorCode::InvalidArgument, "functional derivative target must be a field or its partial derivative");
  std::vector<std::string> pattern;
  for (const auto& s : target.slots) pattern.push_back(s.label);
  for (const auto& d : target.derivs) pattern.push_back(d.label);
  const std::set<std::string> pattern_set(pattern.begin(), pattern.end());
  if (pattern_set.size() != pattern.size())
    fail(ErrorCode::PatternIndexCollision, "target indices of " + target.name + " must be distinct");
  for (const auto& t : e.terms)
    for (const auto& f : summarize(t).free)
      if (pattern_set.contains(f.label))
        fail(ErrorCode::PatternIndexCollision, "target index " + f.label + " occurs free in the expression");

  auto matches = [&](const Factor& f) {
    if (f.is_group() || f.name != target.name || f.rank() != target.rank()) return false;
    if (f.derivs.size() != target.derivs.size() || f.has_covariant_derivs()) return false;
    for (std::size_t s = 0; s < f.slots.size(); ++s)
      if (f.slots[s].variance != target.slots[s].variance) return false;
    return true;
  };

  const std::size_t order = target.derivs.size();
  std::vector<std::vector<std::size_t>> deriv_perms;
  {
    std::vector<std::size_t> p(order);
    std::iota(p.begin(), p.end(), 0);
    do deriv_perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
  }
  const Rational weight(1, static_cast<std::int64_t>(deriv_perms.size()));

  Expression out;
  for (const auto& original : e.terms) {
    Term t = freshen_dummies(original, pattern_set);
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      const Factor& f = t.factors[k];
      if (!matches(f)) continue;
      std::vector<Factor> deltas;
      for (std::size_t s = 0; s < f.slots.size(); ++s) {
        const auto& occ = f.slots[s].label;
        const auto& tgt = target.slots[s].label;
        deltas.push_back(f.slots[s].variance == Variance::Lower ? make_kdelta(tgt, occ)
                                                                : make_kdelta(occ, tgt));
      }
      for (const auto& perm : deriv_perms) {
        Term d = t;
        d.coeff *= weight;
        d.factors.erase(d.factors.begin() + k);
        d.factors.insert(d.factors.end(), deltas.begin(), deltas.end());
        for (std::size_t r = 0; r < order; ++r)
          d.factors.push_back(make_kdelta(target.derivs[perm[r]].label, f.derivs[r].label));
        out.terms.push_back(std::move(d));
      }
    }
  }
  return out;
}

}  // namespace indicial
