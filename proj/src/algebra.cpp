#include "indicial/algebra.hpp"

#include "indicial/error.hpp"
#include "indicial/rules.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace indicial {

Expression expand(const Expression& e, const Context& ctx) {
  Expression substituted = substitute_components(e, ctx);
  Expression out;
  for (const auto& t : substituted.terms) out.terms.push_back(freshen_dummies(t, {}));
  return out;
}

namespace {

bool is_kdelta(const Factor& f) {
  return !f.is_group() && f.name == kKroneckerName && f.rank() == 2 && !f.has_derivs() &&
         f.slots[0].variance != f.slots[1].variance;
}

struct Location {
  std::size_t factor;
  std::size_t slot;  // index into slots; npos when elsewhere (deriv or group)
};

// Where the label occurs in the term, excluding factor `skip`.
std::optional<Location> partner(const Term& t, const std::string& label, std::size_t skip) {
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (i == skip) continue;
    const Factor& f = t.factors[i];
    for (std::size_t s = 0; s < f.slots.size(); ++s)
      if (f.slots[s].label == label) return Location{i, s};
    for (const auto& o : occurrences(f))
      if (o.label == label) return Location{i, std::string::npos};
  }
  return std::nullopt;
}

void multiply_by_dimension(Term& t, const Context& ctx) {
  if (ctx.metric.dimension)
    t.coeff *= *ctx.metric.dimension;
  else
    t.factors.push_back(Factor{std::string(kDimensionName), {}, {}, {}});
}

void erase_factor(Term& t, std::size_t i) { t.factors.erase(t.factors.begin() + i); }

bool contract_kdelta(Term& t, const Context& ctx) {
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    const Factor& d = t.factors[i];
    if (!is_kdelta(d)) continue;
    const bool lower_first = d.slots[0].variance == Variance::Lower;
    std::string up = d.slots[lower_first ? 1 : 0].label;
    std::string lo = d.slots[lower_first ? 0 : 1].label;
    if (up == lo) {
      erase_factor(t, i);
      multiply_by_dimension(t, ctx);
      return true;
    }
    if (partner(t, lo, i)) {
      erase_factor(t, i);
      t = relabel(t, {{lo, up}});
      return true;
    }
    if (partner(t, up, i)) {
      erase_factor(t, i);
      t = relabel(t, {{up, lo}});
      return true;
    }
  }
  return false;
}

bool contract_metric(Term& t, const Context& ctx) {
  if (!ctx.has_metric()) return false;
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    Factor& g = t.factors[i];
    if (!ctx.is_metric(g) || g.has_derivs()) continue;
    if (g.slots[0].variance != g.slots[1].variance) {
      // A mixed metric is the identity.
      g.name = std::string(kKroneckerName);
      return true;
    }
    const Variance v = g.slots[0].variance;
    for (std::size_t s = 0; s < 2; ++s) {
      const std::string x = g.slots[s].label;
      const std::string y = g.slots[1 - s].label;
      auto loc = partner(t, x, i);
      if (!loc || loc->slot == std::string::npos) continue;
      Factor& p = t.factors[loc->factor];
      if (p.slots[loc->slot].variance == v || p.has_derivs()) continue;
      if (ctx.is_metric(p)) {
        // g^{yx} g_{xc} -> kdelta^y_c
        const std::string c = p.slots[1 - loc->slot].label;
        Factor delta = v == Variance::Upper ? make_kdelta(y, c) : make_kdelta(c, y);
        const std::size_t hi = std::max(i, loc->factor), lo = std::min(i, loc->factor);
        erase_factor(t, hi);
        erase_factor(t, lo);
        t.factors.push_back(std::move(delta));
        return true;
      }
      p.slots[loc->slot] = Slot{y, v};
      erase_factor(t, i);
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> block_positions(const BlockSpec& b, std::size_t offset, std::size_t count,
                                         const std::string& name) {
  std::vector<std::size_t> out;
  if (b.all) {
    for (std::size_t k = 0; k < count; ++k) out.push_back(offset + k);
    return out;
  }
  for (auto p : b.positions) {
    if (p == 0 || p > count)
      fail(ErrorCode::ArityMismatch, "symmetry position " + std::to_string(p) + " out of range for " + name);
    out.push_back(offset + p - 1);
  }
  return out;
}

}  // namespace

Expression contract(const Expression& e, const Context& ctx) {
  Expression out;
  for (Term t : e.terms) {
    while (contract_kdelta(t, ctx) || contract_metric(t, ctx)) {
    }
    if (t.coeff.numerator() != 0) out.terms.push_back(std::move(t));
  }
  return out;
}

std::string decsym(Context& ctx, const std::string& name, std::size_t cov_arity,
                   std::size_t contra_arity, const std::vector<BlockSpec>& cov_blocks,
                   const std::vector<BlockSpec>& contra_blocks) {
  SymmetryDeclaration decl{name, cov_arity, contra_arity, {}};
  auto known = ctx.arities.find(name);
  if (known != ctx.arities.end() && known->second != decl.rank())
    fail(ErrorCode::ArityMismatch, name + " has " + std::to_string(known->second) +
                                       " indices but the declaration covers " +
                                       std::to_string(decl.rank()));
  for (const auto& b : cov_blocks)
    decl.blocks.push_back({b.kind, block_positions(b, 0, cov_arity, name)});
  for (const auto& b : contra_blocks)
    decl.blocks.push_back({b.kind, block_positions(b, cov_arity, contra_arity, name)});
  std::erase_if(decl.blocks, [](const SymmetryBlock& b) { return b.positions.size() < 2; });

  std::string warning;
  auto seen = ctx.first_signature.find(name);
  if (seen != ctx.first_signature.end() && seen->second != std::pair{cov_arity, contra_arity})
    warning = "warning: decsym(" + name + ") declares " + std::to_string(cov_arity) + " lower and " +
              std::to_string(contra_arity) + " upper slots but " + name + " was introduced with " +
              std::to_string(seen->second.first) + " lower and " + std::to_string(seen->second.second) +
              " upper; the symmetry applies to slot positions in either variance";
  ctx.arities.emplace(name, decl.rank());
  ctx.symmetries.declare(std::move(decl));
  return warning;
}

}  // namespace indicial
