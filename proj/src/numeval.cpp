#include "indicial/numeval.hpp"

#include "indicial/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace indicial {

namespace {

std::size_t power(int base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

struct GroupElement {
  std::vector<std::size_t> perm;
  int sign = 1;
};

int parity(const std::vector<std::size_t>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

// All permutations of `positions` (within a full permutation of size n).
std::vector<GroupElement> block_group(std::size_t n, const std::vector<std::size_t>& positions,
                                      bool signed_block) {
  std::vector<GroupElement> out;
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    GroupElement g{std::vector<std::size_t>(n), 1};
    std::iota(g.perm.begin(), g.perm.end(), 0);
    for (std::size_t k = 0; k < positions.size(); ++k) g.perm[positions[k]] = positions[order[k]];
    if (signed_block) g.sign = parity(order);
    out.push_back(std::move(g));
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::vector<GroupElement> compose(const std::vector<GroupElement>& a, const std::vector<GroupElement>& b) {
  std::vector<GroupElement> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      GroupElement z{std::vector<std::size_t>(x.perm.size()), x.sign * y.sign};
      for (std::size_t i = 0; i < z.perm.size(); ++i) z.perm[i] = x.perm[y.perm[i]];
      out.push_back(std::move(z));
    }
  return out;
}

}  // namespace

ComponentAssignment::ComponentAssignment(int dimension, std::uint64_t seed, const Context& ctx)
    : dim_(dimension), rng_(seed), metric_name_(ctx.metric.name), symmetries_(ctx.symmetries) {
  if (dimension < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
  Eigen::MatrixXd m(dim_, dim_);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = u(rng_);
  Eigen::MatrixXd g = (m + m.transpose()) / 2 + dim_ * Eigen::MatrixXd::Identity(dim_, dim_);
  Eigen::MatrixXd inv = g.inverse();
  metric_.resize(power(dim_, 2));
  inverse_.resize(power(dim_, 2));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      metric_[i * dim_ + j] = g(i, j);
      inverse_[i * dim_ + j] = inv(i, j);
    }
}

ComponentAssignment ComponentAssignment::from_json(const std::string& text, const Context& ctx,
                                                   std::uint64_t seed) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("fixture is not valid JSON: ") + e.what());
  }
  ComponentAssignment a(doc.at("dimension").get<int>(), seed, ctx);
  a.generate_missing_ = doc.value("generate_missing", false);
  if (doc.contains("metric")) {
    const auto rows = doc["metric"].get<std::vector<std::vector<double>>>();
    if (rows.size() != static_cast<std::size_t>(a.dim_))
      fail(ErrorCode::InvalidArgument, "fixture metric must be dimension x dimension");
    Eigen::MatrixXd g(a.dim_, a.dim_);
    for (int i = 0; i < a.dim_; ++i) {
      if (rows[i].size() != static_cast<std::size_t>(a.dim_))
        fail(ErrorCode::InvalidArgument, "fixture metric must be dimension x dimension");
      for (int j = 0; j < a.dim_; ++j) g(i, j) = rows[i][j];
    }
    if (!g.isApprox(g.transpose()) || std::abs(g.determinant()) < 1e-12)
      fail(ErrorCode::InvalidArgument, "fixture metric must be symmetric and invertible");
    Eigen::MatrixXd inv = g.inverse();
    for (int i = 0; i < a.dim_; ++i)
      for (int j = 0; j < a.dim_; ++j) {
        a.metric_[i * a.dim_ + j] = g(i, j);
        a.inverse_[i * a.dim_ + j] = inv(i, j);
      }
  }
  for (const auto& t : doc.value("tensors", nlohmann::json::array())) {
    const auto name = t.at("name").get<std::string>();
    const auto rank = t.value("rank", std::size_t{0});
    const auto derivs = t.value("derivs", std::size_t{0});
    auto values = t.at("values").get<std::vector<double>>();
    if (values.size() != power(a.dim_, rank + derivs))
      fail(ErrorCode::InvalidArgument, "fixture tensor " + name + " has the wrong number of values");
    a.base_[Key{name, rank, derivs, std::string(rank, 'd')}] = std::move(values);
  }
  return a;
}

std::size_t ComponentAssignment::offset(const std::vector<int>& index) const {
  std::size_t off = 0;
  for (int i : index) {
    if (i < 0 || i >= dim_) fail(ErrorCode::InvalidArgument, "index value out of range");
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return off;
}

ComponentAssignment::Array ComponentAssignment::random_array(std::size_t size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Array a(size);
  for (auto& x : a) x = u(rng_);
  return a;
}

void ComponentAssignment::symmetrize(Array& a, const std::string& name, std::size_t rank,
                                     std::size_t derivs) const {
  const std::size_t n = rank + derivs;
  std::vector<GroupElement> group{{std::vector<std::size_t>(n), 1}};
  std::iota(group.front().perm.begin(), group.front().perm.end(), 0);
  if (const auto* decl = symmetries_.find(name, rank))
    for (const auto& b : decl->blocks)
      group = compose(group, block_group(n, b.positions, b.kind == BlockKind::Antisymmetric));
  if (derivs > 1) {
    std::vector<std::size_t> positions(derivs);
    std::iota(positions.begin(), positions.end(), rank);
    group = compose(group, block_group(n, positions, false));
  }
  if (group.size() == 1) return;

  Array out(a.size(), 0.0);
  std::vector<int> index(n, 0), moved(n);
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = n; k-- > 0;) {
      index[k] = static_cast<int>(rem % static_cast<std::size_t>(dim_));
      rem /= static_cast<std::size_t>(dim_);
    }
    double sum = 0;
    for (const auto& g : group) {
      for (std::size_t k = 0; k < n; ++k) moved[k] = index[g.perm[k]];
      sum += g.sign * a[offset(moved)];
    }
    out[flat] = sum / static_cast<double>(group.size());
  }
  a = std::move(out);
}

ComponentAssignment::Array& ComponentAssignment::base(const std::string& name, std::size_t rank,
                                                      std::size_t derivs) {
  Key key{name, rank, derivs, std::string(rank, 'd')};
  auto it = base_.find(key);
  if (it != base_.end()) return it->second;
  const bool is_metric = metric_name_ && name == *metric_name_ && rank == 2;
  if (is_metric && derivs == 0) return base_.emplace(key, metric_).first->second;
  if (!generate_missing_) fail(ErrorCode::UnboundName, "no components assigned to " + name);
  Array a = is_metric && flat_metric_ ? Array(power(dim_, rank + derivs), 0.0)
                                      : random_array(power(dim_, rank + derivs));
  symmetrize(a, name, rank, derivs);
  return base_.emplace(key, std::move(a)).first->second;
}

const ComponentAssignment::Array& ComponentAssignment::materialized(const Key& key) {
  if (key.variance.find('u') == std::string::npos) return base(key.name, key.rank, key.derivs);
  auto it = raised_.find(key);
  if (it != raised_.end()) return it->second;

  Array current = base(key.name, key.rank, key.derivs);
  const std::size_t n = key.rank + key.derivs;
  std::vector<int> index(n), source(n);
  for (std::size_t p = 0; p < key.rank; ++p) {
    if (key.variance[p] != 'u') continue;
    Array next(current.size(), 0.0);
    for (std::size_t flat = 0; flat < current.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t k = n; k-- > 0;) {
        index[k] = static_cast<int>(rem % static_cast<std::size_t>(dim_));
        rem /= static_cast<std::size_t>(dim_);
      }
      source = index;
      double sum = 0;
      for (int c = 0; c < dim_; ++c) {
        source[p] = c;
        sum += inverse_[index[p] * dim_ + c] * current[offset(source)];
      }
      next[flat] = sum;
    }
    current = std::move(next);
  }
  return raised_.emplace(key, std::move(current)).first->second;
}

double ComponentAssignment::component(const std::string& name, std::size_t rank, std::size_t derivs,
                                      const std::vector<int>& index) {
  return base(name, rank, derivs).at(offset(index));
}

void ComponentAssignment::set_component(const std::string& name, std::size_t rank, std::size_t derivs,
                                        const std::vector<int>& index, double value) {
  base(name, rank, derivs).at(offset(index)) = value;
  std::erase_if(raised_, [&](const auto& entry) { return entry.first.name == name; });
}

double ComponentAssignment::value(const Factor& f, const std::vector<int>& index) {
  if (f.is_group() || f.has_covariant_derivs())
    fail(ErrorCode::InertOperatorPresent, "cannot evaluate an inert covariant derivative numerically");
  if (f.name == kKroneckerName && f.rank() == 2)
    return f.has_derivs() ? 0.0 : (index[0] == index[1] ? 1.0 : 0.0);
  if (f.name == kDimensionName && f.rank() == 0) return f.has_derivs() ? 0.0 : dim_;
  std::string variance;
  for (const auto& s : f.slots) variance += s.variance == Variance::Lower ? 'd' : 'u';
  if (metric_name_ && f.name == *metric_name_ && f.rank() == 2 && !f.has_derivs()) {
    if (variance == "ud" || variance == "du") return index[0] == index[1] ? 1.0 : 0.0;
    const auto& m = variance == "uu" ? inverse_ : metric_;
    return m[index[0] * dim_ + index[1]];
  }
  return materialized(Key{f.name, f.rank(), f.derivs.size(), variance})[offset(index)];
}

double numeric_eval(const Expression& e, ComponentAssignment& a,
                    const std::map<std::string, int>& free_values) {
  double total = 0;
  for (const auto& t : e.terms) {
    for (const auto& f : t.factors)
      if (f.is_group() || f.has_covariant_derivs())
        fail(ErrorCode::InertOperatorPresent, "cannot evaluate an inert covariant derivative numerically");
    const auto summary = summarize(t);
    std::map<std::string, int> values;
    for (const auto& f : summary.free) {
      auto it = free_values.find(f.label);
      if (it == free_values.end()) fail(ErrorCode::UnboundName, "free index " + f.label + " has no value");
      values[f.label] = it->second;
    }
    for (const auto& d : summary.dummies) values[d] = 0;

    std::vector<std::vector<std::string>> factor_labels;
    for (const auto& f : t.factors) {
      std::vector<std::string> ls;
      for (const auto& s : f.slots) ls.push_back(s.label);
      for (const auto& d : f.derivs) ls.push_back(d.label);
      factor_labels.push_back(std::move(ls));
    }

    const double coeff = boost::rational_cast<double>(t.coeff);
    std::vector<int> index;
    for (;;) {
      double product = coeff;
      for (std::size_t k = 0; k < t.factors.size() && product != 0; ++k) {
        index.clear();
        for (const auto& l : factor_labels[k]) index.push_back(values[l]);
        product *= a.value(t.factors[k], index);
      }
      total += product;
      std::size_t i = 0;
      while (i < summary.dummies.size() && ++values[summary.dummies[i]] == a.dimension())
        values[summary.dummies[i++]] = 0;
      if (i == summary.dummies.size()) break;
    }
  }
  return total;
}

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* env = std::getenv("INDICIAL_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  return *end == '\0' ? v : fallback;
}

}  // namespace indicial
