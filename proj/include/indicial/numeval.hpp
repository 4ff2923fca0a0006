#pragma once

// Numeric evaluation at a small fixed dimension, used as an oracle for the
// symbolic passes.
//
// Every tensor gets independent real components for its all-lower form,
// one array per (name, rank, derivative order). Derivative slots are jet
// variables, symmetric among themselves; declared slot symmetries are
// imposed by averaging over the symmetry group. Upper slots are obtained
// by raising with the inverse metric, so metric contraction is exact. The
// metric is a random symmetric, diagonally dominant matrix; kdelta is the
// identity and `dim` evaluates to the dimension.
//
// Index values are 0-based.

#include "indicial/context.hpp"
#include "indicial/expr.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace indicial {

class ComponentAssignment {
 public:
  ComponentAssignment(int dimension, std::uint64_t seed, const Context& ctx);

  /// Fixture format:
  ///   {"dimension": 2,
  ///    "metric": [[1, 0], [0, -1]],                         (optional)
  ///    "tensors": [{"name": "A", "rank": 1, "derivs": 1,
  ///                 "values": [a00, a01, a10, a11]}],       (row-major, lower slots then derivatives)
  ///    "generate_missing": false}                           (optional, default false)
  /// With generate_missing=false, tensors absent from the fixture raise UnboundName.
  static ComponentAssignment from_json(const std::string& text, const Context& ctx,
                                       std::uint64_t seed = 0);

  int dimension() const { return dim_; }

  /// Metric derivative jets are zero when set; affects arrays not yet generated.
  void set_flat_metric(bool flat) { flat_metric_ = flat; }

  /// Value of the all-lower component (slot values then derivative values).
  double component(const std::string& name, std::size_t rank, std::size_t derivs,
                   const std::vector<int>& index);
  /// Overwrites one all-lower component without re-imposing symmetries.
  void set_component(const std::string& name, std::size_t rank, std::size_t derivs,
                     const std::vector<int>& index, double value);

  /// Value of an indexed factor at concrete index values (slots then derivatives).
  double value(const Factor& f, const std::vector<int>& index);

 private:
  using Array = std::vector<double>;
  struct Key {
    std::string name;
    std::size_t rank;
    std::size_t derivs;
    std::string variance;  // 'd'/'u' per slot
    auto operator<=>(const Key&) const = default;
  };

  std::size_t offset(const std::vector<int>& index) const;
  Array& base(const std::string& name, std::size_t rank, std::size_t derivs);
  const Array& materialized(const Key& key);
  Array random_array(std::size_t size);
  void symmetrize(Array& a, const std::string& name, std::size_t rank, std::size_t derivs) const;

  int dim_;
  std::mt19937_64 rng_;
  std::optional<std::string> metric_name_;
  SymmetryTable symmetries_;
  std::vector<double> metric_;   // D x D, row-major
  std::vector<double> inverse_;  // D x D, row-major
  bool flat_metric_ = false;
  bool generate_missing_ = true;
  std::map<Key, Array> base_;    // variance string all 'd'
  std::map<Key, Array> raised_;
};

/// Sum over all dummy values. `free_values` binds every free label.
/// Throws UnboundName for unbound free labels or missing tensors and
/// InertOperatorPresent for inert covariant derivatives.
double numeric_eval(const Expression& e, ComponentAssignment& a,
                    const std::map<std::string, int>& free_values = {});

/// INDICIAL_SEED when set and numeric, otherwise `fallback`.
std::uint64_t seed_from_environment(std::uint64_t fallback);

}  // namespace indicial
