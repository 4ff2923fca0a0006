#pragma once

// Expression data model for indicial tensor algebra.
//
// An Expression is a flat sum of Terms; a Term is an exact rational
// coefficient times a product of Factors. A Factor is a named tensor with
// an ordered list of index slots (each lower or upper), followed by
// derivative slots. A factor with a non-empty `group` stands for an inert
// covariant derivative applied to the product of the grouped factors.

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace indicial {

using Rational = boost::rational<std::int64_t>;

enum class Variance : std::uint8_t { Lower, Upper };

struct Slot {
  std::string label;
  Variance variance = Variance::Lower;

  bool operator==(const Slot&) const = default;
};

enum class DerivKind : std::uint8_t { Ordinary, Covariant };

struct DerivSlot {
  std::string label;
  DerivKind kind = DerivKind::Ordinary;

  bool operator==(const DerivSlot&) const = default;
};

struct Factor {
  std::string name;
  std::vector<Slot> slots;
  std::vector<DerivSlot> derivs;
  std::vector<Factor> group;

  bool is_group() const { return !group.empty(); }
  std::size_t rank() const { return slots.size(); }
  bool has_derivs() const { return !derivs.empty(); }
  bool has_covariant_derivs() const;

  std::vector<std::string> cov() const;
  std::vector<std::string> contra() const;

  bool operator==(const Factor&) const = default;
};

struct Term {
  Rational coeff{1};
  std::vector<Factor> factors;

  bool operator==(const Term&) const = default;
};

struct Expression {
  std::vector<Term> terms;

  Expression() = default;
  explicit Expression(Term t);
  explicit Expression(Factor f);
  explicit Expression(Rational r);

  bool is_zero() const { return terms.empty(); }
  bool operator==(const Expression&) const = default;
};

// Construction helpers.
Factor make_tensor(std::string name, const std::vector<std::string>& cov,
                   const std::vector<std::string>& contra,
                   const std::vector<std::string>& ordinary_derivs = {});
Factor make_kdelta(std::string upper, std::string lower);

inline constexpr std::string_view kKroneckerName = "kdelta";
inline constexpr std::string_view kChristoffelName = "ichr2";
inline constexpr std::string_view kDimensionName = "dim";

// Arithmetic. Multiplication distributes and freshens colliding dummies of
// the right operand; no like-term collection is performed.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression operator*(const Expression& a, const Expression& b);
Expression operator*(const Rational& r, const Expression& e);
Term multiply(const Term& a, const Term& b);

// Index bookkeeping. Derivative slots count as lower positions.
struct IndexRef {
  std::string label;
  Variance variance = Variance::Lower;

  auto operator<=>(const IndexRef&) const = default;
};
using IndexSet = std::set<IndexRef>;

/// All index occurrences of a term, in traversal order.
std::vector<IndexRef> occurrences(const Term& t);
std::vector<IndexRef> occurrences(const Factor& f);

struct IndexSummary {
  std::vector<IndexRef> free;         // first-occurrence order
  std::vector<std::string> dummies;   // first-occurrence order
};
IndexSummary summarize(const Term& t);

std::set<std::string> labels(const Term& t);
std::set<std::string> labels(const Expression& e);

bool is_generated_label(std::string_view label);
std::string generated_label(int n);
/// Smallest generated label `%k` that is not in `used`.
std::string fresh_label(const std::set<std::string>& used);

// Validation under the summation convention.
using ArityTable = std::map<std::string, std::size_t, std::less<>>;

const Term& validate(const Term& t, const ArityTable* arities = nullptr);
const Expression& validate(const Expression& e, const ArityTable* arities = nullptr);

/// Free-index set shared by every term; throws MixedFreeIndices otherwise.
IndexSet free_indices(const Expression& e);
IndexSet free_indices(const Term& t);

// Relabeling.
using Relabeling = std::map<std::string, std::string>;
Factor relabel(const Factor& f, const Relabeling& map);
Term relabel(const Term& t, const Relabeling& map);
Expression relabel(const Expression& e, const Relabeling& map);

/// Dummies relabeled `%1, %2, ...` in first-occurrence order, per term.
Expression rename_dummies(const Expression& e);
Term rename_dummies(const Term& t);

/// Renames the dummies of `t` that appear in `avoid` to fresh labels.
Term freshen_dummies(const Term& t, const std::set<std::string>& avoid);

}  // namespace indicial
