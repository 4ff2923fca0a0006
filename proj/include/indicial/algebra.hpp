#pragma once

#include "indicial/context.hpp"
#include "indicial/expr.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace indicial {

/// Substitutes active component definitions and distributes products.
/// Like terms are not collected.
Expression expand(const Expression& e, const Context& ctx);

/// Kronecker-delta substitution, metric raising/lowering, metric-metric
/// products to deltas and traces to the dimension, applied to a fixpoint.
Expression contract(const Expression& e, const Context& ctx);

/// One `sym(...)`/`anti(...)` item of a symmetry declaration. Positions are
/// 1-based within their variance class; `all` covers the whole class.
struct BlockSpec {
  BlockKind kind = BlockKind::Symmetric;
  std::vector<std::size_t> positions;
  bool all = false;
};

/// Records a symmetry declaration. Blocks apply positionally to the slot
/// list, so an antisymmetric pair stays antisymmetric when its indices are
/// raised. Returns a warning when the declared variance split disagrees
/// with how the tensor was first used.
std::string decsym(Context& ctx, const std::string& name, std::size_t cov_arity,
                   std::size_t contra_arity, const std::vector<BlockSpec>& cov_blocks,
                   const std::vector<BlockSpec>& contra_blocks);

/// A factor rearranged by one element of its symmetry group.
struct SymmetryVariant {
  Factor factor;
  int sign = 1;
};

/// Every arrangement reachable through declared symmetry blocks and
/// commuting ordinary derivative slots, the identity first.
std::vector<SymmetryVariant> symmetry_variants(const Factor& f, const SymmetryTable& symmetries);

struct CanonicalTerm {
  Term term;        // coefficient folded with the permutation sign
  std::string key;  // equal keys <=> alpha/symmetry-equivalent structure
};

/// Upper bound on the candidates examined for one term.
inline constexpr std::size_t kCanonicalCandidateLimit = 3628800;  // 10!

/// Canonical representative of a single term; nullopt when the term
/// vanishes by symmetry.
std::optional<CanonicalTerm> canonicalize_term(const Term& t, const SymmetryTable& symmetries);

/// Canonical form: per-term minimization, then like-term collection.
Expression canform(const Expression& e, const Context& ctx);

}  // namespace indicial
