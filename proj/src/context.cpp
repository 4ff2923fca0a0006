#include "indicial/context.hpp"

#include "indicial/error.hpp"

namespace indicial {

void SymmetryTable::declare(SymmetryDeclaration decl) {
  std::set<std::size_t> used;
  for (const auto& b : decl.blocks) {
    for (auto p : b.positions) {
      if (p >= decl.rank())
        fail(ErrorCode::ArityMismatch,
             "symmetry position " + std::to_string(p + 1) + " exceeds the rank of " + decl.name);
      if (!used.insert(p).second)
        fail(ErrorCode::ConflictingDeclaration,
             "overlapping symmetry blocks declared for " + decl.name);
    }
  }
  auto it = table_.find(decl.name);
  if (it != table_.end()) {
    if (it->second.rank() == decl.rank() && it->second.blocks == decl.blocks) return;
    fail(ErrorCode::ConflictingDeclaration, "symmetry of " + decl.name + " already declared");
  }
  table_.emplace(decl.name, std::move(decl));
}

const SymmetryDeclaration* SymmetryTable::find(const std::string& name, std::size_t rank) const {
  auto it = table_.find(name);
  if (it == table_.end() || it->second.rank() != rank) return nullptr;
  return &it->second;
}

namespace {

void register_factor(Context& ctx, const Factor& f) {
  if (f.is_group()) {
    for (const auto& g : f.group) register_factor(ctx, g);
    return;
  }
  auto [it, inserted] = ctx.arities.emplace(f.name, f.rank());
  if (!inserted && it->second != f.rank())
    fail(ErrorCode::ArityMismatch, f.name + " used with " + std::to_string(f.rank()) +
                                       " indices, previously with " + std::to_string(it->second));
  ctx.first_signature.emplace(f.name, std::pair{f.cov().size(), f.contra().size()});
}

}  // namespace

void Context::register_factors(const Expression& e) {
  for (const auto& t : e.terms)
    for (const auto& f : t.factors) register_factor(*this, f);
}

void Context::set_metric(const std::string& name) {
  metric.name = name;
  auto [it, inserted] = arities.emplace(name, 2);
  if (!inserted && it->second != 2)
    fail(ErrorCode::ArityMismatch, "metric " + name + " must carry two indices");
  if (!symmetries.find(name, 2))
    symmetries.declare({name, 2, 0, {{BlockKind::Symmetric, {0, 1}}}});
  arities.emplace(std::string(kChristoffelName), 3);
  if (!symmetries.find(std::string(kChristoffelName), 3))
    symmetries.declare({std::string(kChristoffelName), 2, 1, {{BlockKind::Symmetric, {0, 1}}}});
}

}  // namespace indicial
