#pragma once

#include "indicial/context.hpp"
#include "indicial/expr.hpp"

#include <set>
#include <string>

namespace indicial {

/// Ordinary derivative with respect to coordinate index `index`, by the
/// product rule. Kronecker deltas and `dim` are constants.
Expression idiff(const Expression& e, const std::string& index);

/// ½ g^{k s}(g_{i s,j} + g_{j s,i} - g_{i j,s}) with a fresh summation label.
Expression christoffel(const std::string& i, const std::string& j, const std::string& k,
                       const Context& ctx, const std::set<std::string>& avoid = {});

enum class CovdiffMode { Inert, Expanded };

/// Term-wise inert covariant derivative. A single factor receives a `;`
/// slot; a product is wrapped as a group factor.
Expression covdiff_inert(const Expression& e, const std::string& index);

/// Expanded mode produces `ichr2` connection factors; see expand_christoffels.
Expression covdiff(const Expression& e, const std::string& index, CovdiffMode mode,
                   const Context& ctx);

/// Replaces every `ichr2([i,j],[k])` factor by its metric expansion.
Expression expand_christoffels(const Expression& e, const Context& ctx);

/// Exterior derivative of a form whose free indices are all lower and
/// totally antisymmetric. The free indices are taken in lexicographic
/// order and `index` is appended last, so extdiff(A_m, n) = A_{n,m} - A_{m,n}.
/// The result is returned in canonical form.
Expression extdiff(const Expression& e, const std::string& index, const Context& ctx);

/// Functional derivative with respect to the field (or field derivative)
/// described by `target`, e.g. A([m],[],n). Fields and their derivatives
/// are independent variables; matches are replaced by Kronecker deltas.
Expression fdiff(const Expression& e, const Factor& target);

}  // namespace indicial
