#include "indicial/algebra.hpp"

#include "indicial/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace indicial {

namespace {

int permutation_sign(const std::vector<std::size_t>& perm) {
  int sign = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

template <typename Fn>
void for_each_permutation(std::size_t n, Fn&& fn) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do fn(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
}

// Cartesian product of alternative lists, combining with `join`.
std::vector<SymmetryVariant> cross(const std::vector<SymmetryVariant>& acc,
                                   const std::vector<std::vector<SymmetryVariant>>& options,
                                   auto&& join) {
  std::vector<SymmetryVariant> out = acc;
  for (const auto& opts : options) {
    std::vector<SymmetryVariant> next;
    next.reserve(out.size() * opts.size());
    for (const auto& a : out)
      for (const auto& b : opts) next.push_back(join(a, b));
    out = std::move(next);
  }
  return out;
}

// Maximal runs of ordinary derivative slots commute.
std::vector<std::pair<std::size_t, std::size_t>> ordinary_runs(const std::vector<DerivSlot>& d) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < d.size()) {
    if (d[i].kind != DerivKind::Ordinary) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < d.size() && d[j].kind == DerivKind::Ordinary) ++j;
    if (j - i > 1) runs.emplace_back(i, j);
    i = j;
  }
  return runs;
}

std::vector<SymmetryVariant> deriv_variants(const SymmetryVariant& base) {
  std::vector<SymmetryVariant> out{base};
  for (auto [begin, end] : ordinary_runs(base.factor.derivs)) {
    std::vector<SymmetryVariant> next;
    for (const auto& v : out) {
      for_each_permutation(end - begin, [&](const std::vector<std::size_t>& perm) {
        SymmetryVariant w = v;
        for (std::size_t k = 0; k < perm.size(); ++k)
          w.factor.derivs[begin + k] = v.factor.derivs[begin + perm[k]];
        next.push_back(std::move(w));
      });
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<SymmetryVariant> symmetry_variants(const Factor& f, const SymmetryTable& symmetries) {
  if (f.is_group()) {
    std::vector<std::vector<SymmetryVariant>> inner;
    for (const auto& g : f.group) inner.push_back(symmetry_variants(g, symmetries));
    Factor shell = f;
    shell.group.clear();
    std::vector<SymmetryVariant> members = cross(
        {{shell, 1}}, inner, [](const SymmetryVariant& a, const SymmetryVariant& b) {
          SymmetryVariant c = a;
          c.factor.group.push_back(b.factor);
          c.sign *= b.sign;
          return c;
        });
    std::vector<SymmetryVariant> ordered;
    for (const auto& m : members) {
      for_each_permutation(m.factor.group.size(), [&](const std::vector<std::size_t>& perm) {
        SymmetryVariant w = m;
        for (std::size_t k = 0; k < perm.size(); ++k) w.factor.group[k] = m.factor.group[perm[k]];
        ordered.push_back(std::move(w));
      });
    }
    std::vector<SymmetryVariant> out;
    for (const auto& v : ordered)
      for (auto& w : deriv_variants(v)) out.push_back(std::move(w));
    return out;
  }

  Factor base = f;
  if (base.name == kKroneckerName && base.rank() == 2 && base.slots[0].variance == Variance::Upper &&
      base.slots[1].variance == Variance::Lower)
    std::swap(base.slots[0], base.slots[1]);

  std::vector<SymmetryVariant> out{{base, 1}};
  if (const auto* decl = symmetries.find(base.name, base.rank())) {
    for (const auto& block : decl->blocks) {
      std::vector<SymmetryVariant> next;
      for (const auto& v : out) {
        for_each_permutation(block.positions.size(), [&](const std::vector<std::size_t>& perm) {
          SymmetryVariant w = v;
          for (std::size_t k = 0; k < perm.size(); ++k)
            w.factor.slots[block.positions[k]] = v.factor.slots[block.positions[perm[k]]];
          if (block.kind == BlockKind::Antisymmetric) w.sign *= permutation_sign(perm);
          next.push_back(std::move(w));
        });
      }
      out = std::move(next);
    }
  }
  std::vector<SymmetryVariant> with_derivs;
  for (const auto& v : out)
    for (auto& w : deriv_variants(v)) with_derivs.push_back(std::move(w));
  return with_derivs;
}

namespace {

// Serialization used for ordering. Free labels are written verbatim;
// dummies start with '~' so they sort after any user label. The shape
// writer prints every dummy as a bare '~'; the numbering writer numbers
// dummies by first appearance in writing order.
class KeyWriter {
 public:
  KeyWriter(const std::set<std::string>& dummies, std::vector<std::string>* numbering)
      : dummies_(dummies), numbering_(numbering) {}

  void factor(const Factor& f, std::string& out) const {
    if (f.is_group()) {
      out += "\x01(";
      for (const auto& g : f.group) {
        factor(g, out);
        out += '\x02';
      }
      out += ')';
    } else {
      out += f.name;
      out += '\x03';
      out += std::to_string(f.rank());
    }
    out += '|';
    for (const auto& s : f.slots) {
      out += s.variance == Variance::Lower ? 'd' : 'u';
      label(s.label, out);
    }
    out += '|';
    for (const auto& d : f.derivs) {
      out += d.kind == DerivKind::Ordinary ? ',' : ';';
      label(d.label, out);
    }
  }

 private:
  void label(const std::string& l, std::string& out) const {
    if (!dummies_.contains(l)) {
      out += l;
    } else if (numbering_) {
      auto it = std::find(numbering_->begin(), numbering_->end(), l);
      std::size_t n = static_cast<std::size_t>(it - numbering_->begin()) + 1;
      if (it == numbering_->end()) numbering_->push_back(l);
      out += '~';
      for (std::size_t div = 1000; div; div /= 10) out += static_cast<char>('0' + (n / div) % 10);
    } else {
      out += '~';
    }
    out += ' ';
  }

  const std::set<std::string>& dummies_;
  std::vector<std::string>* numbering_;
};

// Depth-first search for the least key over the orderings of factors
// within runs of equal shape. Prefixes already greater than the best key
// are abandoned; equal keys with opposite signs mark the term as vanishing.
class LeastKeySearch {
 public:
  explicit LeastKeySearch(const std::set<std::string>& dummies) : writer_(dummies, &numbering_) {}

  void run(const std::vector<Factor>& order, const std::vector<std::size_t>& run_end, int sign) {
    order_ = &order;
    run_end_ = &run_end;
    sign_ = sign;
    used_.assign(order.size(), false);
    chosen_.clear();
    key_.clear();
    numbering_.clear();
    place(0);
  }

  bool found() const { return best_sign_ != 0; }
  bool vanishes() const { return vanishes_; }
  int sign() const { return best_sign_; }
  std::string& key() { return best_key_; }
  std::vector<Factor>& factors() { return best_factors_; }

 private:
  void place(std::size_t pos) {
    if (pos == order_->size()) {
      if (++examined_ > kCanonicalCandidateLimit)
        fail(ErrorCode::CanonicalizationLimit, "term has too many equivalent arrangements");
      if (best_sign_ == 0 || key_ < best_key_) {
        best_key_ = key_;
        best_factors_.clear();
        for (std::size_t k : chosen_) best_factors_.push_back((*order_)[k]);
        best_sign_ = sign_;
        vanishes_ = false;
      } else if (key_ == best_key_ && sign_ != best_sign_) {
        vanishes_ = true;
      }
      return;
    }
    // Positions [pos, run_end[pos]) hold one run of interchangeable shapes.
    const std::size_t begin = run_begin(pos), end = (*run_end_)[pos];
    for (std::size_t k = begin; k < end; ++k) {
      if (used_[k]) continue;
      const std::size_t key_size = key_.size(), numbered = numbering_.size();
      writer_.factor((*order_)[k], key_);
      key_ += '\x04';
      if (best_sign_ == 0 || !prefix_exceeds_best()) {
        used_[k] = true;
        chosen_.push_back(k);
        place(pos + 1);
        chosen_.pop_back();
        used_[k] = false;
      }
      key_.resize(key_size);
      numbering_.resize(numbered);
    }
  }

  std::size_t run_begin(std::size_t pos) const {
    std::size_t b = pos;
    while (b > 0 && (*run_end_)[b - 1] == (*run_end_)[pos]) --b;
    return b;
  }

  bool prefix_exceeds_best() const {
    const std::size_t n = std::min(key_.size(), best_key_.size());
    const int c = key_.compare(0, n, best_key_, 0, n);
    return c > 0;
  }

  std::vector<std::string> numbering_;
  KeyWriter writer_;
  const std::vector<Factor>* order_ = nullptr;
  const std::vector<std::size_t>* run_end_ = nullptr;
  int sign_ = 1;
  std::vector<bool> used_;
  std::vector<std::size_t> chosen_;
  std::string key_;

  std::size_t examined_ = 0;
  std::string best_key_;
  std::vector<Factor> best_factors_;
  int best_sign_ = 0;
  bool vanishes_ = false;
};

}  // namespace

std::optional<CanonicalTerm> canonicalize_term(const Term& t, const SymmetryTable& symmetries) {
  if (t.coeff.numerator() == 0) return std::nullopt;
  const auto summary = summarize(t);
  const std::set<std::string> dummies(summary.dummies.begin(), summary.dummies.end());
  const KeyWriter shape_writer(dummies, nullptr);

  std::vector<std::vector<SymmetryVariant>> variants;
  for (const auto& f : t.factors) variants.push_back(symmetry_variants(f, symmetries));

  LeastKeySearch search(dummies);
  std::vector<std::size_t> choice(variants.size(), 0);
  std::vector<std::pair<std::string, Factor>> keyed(variants.size());
  std::vector<Factor> order(variants.size());
  std::vector<std::size_t> run_end(variants.size());
  for (;;) {
    int sign = 1;
    for (std::size_t i = 0; i < variants.size(); ++i) {
      const auto& v = variants[i][choice[i]];
      sign *= v.sign;
      keyed[i].first.clear();
      shape_writer.factor(v.factor, keyed[i].first);
      keyed[i].second = v.factor;
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < keyed.size();) {
      std::size_t j = i + 1;
      while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
      for (std::size_t k = i; k < j; ++k) {
        order[k] = keyed[k].second;
        run_end[k] = j;
      }
      i = j;
    }
    search.run(order, run_end, sign);

    std::size_t i = 0;
    while (i < choice.size() && ++choice[i] == variants[i].size()) choice[i++] = 0;
    if (i == choice.size()) break;
  }

  if (search.vanishes()) return std::nullopt;
  Term out{t.coeff * search.sign(), std::move(search.factors())};
  return CanonicalTerm{rename_dummies(out), std::move(search.key())};
}

Expression canform(const Expression& e, const Context& ctx) {
  struct Slot {
    Term term;
    std::size_t weight;
  };
  std::map<std::string, Slot> collected;
  for (const auto& t : e.terms) {
    auto c = canonicalize_term(t, ctx.symmetries);
    if (!c) continue;
    auto it = collected.find(c->key);
    if (it == collected.end()) {
      std::size_t weight = occurrences(c->term).size();
      collected.emplace(c->key, Slot{std::move(c->term), weight});
    } else {
      it->second.term.coeff += c->term.coeff;
    }
  }
  std::vector<std::tuple<std::size_t, const std::string*, Term*>> order;
  for (auto& [key, slot] : collected)
    if (slot.term.coeff.numerator() != 0) order.emplace_back(slot.weight, &key, &slot.term);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                            : *std::get<1>(a) < *std::get<1>(b);
  });
  Expression out;
  for (auto& [w, key, term] : order) out.terms.push_back(std::move(*term));
  return out;
}

}  // namespace indicial
