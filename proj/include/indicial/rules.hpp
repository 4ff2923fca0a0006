#pragma once

#include "indicial/context.hpp"
#include "indicial/expr.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace indicial {

// Component definitions ------------------------------------------------------

/// Attaches `definition` to the tensor described by `signature`
/// (distinct slot labels, no derivatives). The free indices of the
/// definition must be exactly the signature's slots; SignatureMismatch
/// otherwise.
void define_components(Context& ctx, const Factor& signature, const Expression& definition);

/// Returns false when `name` had no definition.
bool remcomps(Context& ctx, const std::string& name);

/// Replaces every factor with an active definition, recursively. Slots
/// whose variance differs from the definition are converted with the
/// metric; ordinary derivative slots are applied with idiff.
Expression substitute_components(const Expression& e, const Context& ctx);

// Rewrite rules --------------------------------------------------------------

void matchdeclare(Context& ctx, const std::vector<std::string>& labels);

/// Stores a rule. The pattern must have one or two terms; every
/// metavariable used by the replacement must occur in the pattern.
void defrule(Context& ctx, const std::string& name, const Expression& pattern,
             const Expression& replacement);

inline constexpr std::size_t kRewriteLimit = 10000;

/// Rewrites until the canonical form stops changing. Returns `e`
/// untouched when the rule never fires.
Expression apply1(const Expression& e, const RewriteRule& rule, const Context& ctx);
Expression apply1(const Expression& e, const std::string& rule_name, const Context& ctx);

}  // namespace indicial
