#pragma once

// Session state that the algebraic passes read: metric configuration,
// convention flags, symmetry declarations, component definitions and
// rewrite rules. Passes take it by const reference; only the interpreter
// mutates it.

#include "indicial/expr.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace indicial {

struct MetricConfig {
  std::optional<std::string> name;
  /// Unset means the dimension stays symbolic (`dim`).
  std::optional<std::int64_t> dimension;
};

enum class BlockKind { Symmetric, Antisymmetric };

/// Positions are 0-based over the factor's slot list.
struct SymmetryBlock {
  BlockKind kind = BlockKind::Symmetric;
  std::vector<std::size_t> positions;

  bool operator==(const SymmetryBlock&) const = default;
};

struct SymmetryDeclaration {
  std::string name;
  std::size_t cov_arity = 0;
  std::size_t contra_arity = 0;
  std::vector<SymmetryBlock> blocks;

  std::size_t rank() const { return cov_arity + contra_arity; }
  bool operator==(const SymmetryDeclaration&) const = default;
};

class SymmetryTable {
 public:
  /// Throws ConflictingDeclaration on overlapping blocks or a differing
  /// redeclaration; an identical redeclaration is a no-op.
  void declare(SymmetryDeclaration decl);
  const SymmetryDeclaration* find(const std::string& name, std::size_t rank) const;
  bool empty() const { return table_.empty(); }

 private:
  std::map<std::string, SymmetryDeclaration> table_;
};

struct ComponentDefinition {
  Factor signature;
  Expression definition;
};

struct RewriteRule {
  std::string name;
  Expression pattern;
  Expression replacement;
  std::set<std::string> metavariables;
};

struct Context {
  MetricConfig metric;
  bool geowedge = true;
  SymmetryTable symmetries;
  std::map<std::string, ComponentDefinition> components;
  std::map<std::string, RewriteRule> rules;
  std::set<std::string> metavariables;
  ArityTable arities;
  /// (lower, upper) slot counts of each tensor's first appearance.
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> first_signature;

  /// Records name/arity of every tensor factor in `e`; throws ArityMismatch.
  void register_factors(const Expression& e);

  bool has_metric() const { return metric.name.has_value(); }
  bool is_metric(const Factor& f) const {
    return metric.name && !f.is_group() && f.name == *metric.name && f.rank() == 2;
  }
  /// Records the metric and declares it symmetric.
  void set_metric(const std::string& name);
};

}  // namespace indicial
