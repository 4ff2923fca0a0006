#include <doctest.h>

#include "indicial/algebra.hpp"
#include "indicial/calculus.hpp"
#include "indicial/error.hpp"
#include "indicial/numeval.hpp"
#include "indicial/parser.hpp"
#include "indicial/printer.hpp"
#include "indicial/rules.hpp"
#include "random_expr.hpp"

using namespace indicial;

namespace {

Expression P(std::string_view s) { return parse_expression(s); }

Context metric_context() {
  Context ctx;
  ctx.set_metric("g");
  return ctx;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an indicial::Error");
  return ErrorCode::InvalidArgument;
}

// fdiff matches slot variance, so A^{a}_{,b} is a different variable from
// A_{a,b} even though both depend on the same numeric jet.
bool lower_jets_only(const Expression& e) {
  for (const auto& t : e.terms)
    for (const auto& f : t.factors)
      if (f.name == "A" && f.has_derivs() && f.slots[0].variance == Variance::Upper) return false;
  return true;
}

}  // namespace

TEST_SUITE("idiff") {
  TEST_CASE("single factor and product rule") {
    CHECK(idiff(P("A([m],[])"), "n") == P("A([m],[],n)"));
    Context ctx;
    CHECK(canform(idiff(P("x([a],[])*y([],[a])"), "k"), ctx) ==
          canform(P("x([a],[],k)*y([],[a]) + x([a],[])*y([],[a],k)"), ctx));
  }

  TEST_CASE("constants differentiate to zero") {
    CHECK(idiff(Expression(Rational(3)), "k").is_zero());
    CHECK(idiff(Expression(make_kdelta("a", "b")), "k").is_zero());
  }

  TEST_CASE("partials commute") {
    Context ctx;
    Expression th = P("theta");
    CHECK(canform(idiff(idiff(th, "m"), "n") - idiff(idiff(th, "n"), "m"), ctx).is_zero());
  }

  TEST_CASE("a colliding dummy is renamed") {
    Expression e = idiff(P("x([a],[])*y([],[a])"), "a");
    CHECK(free_indices(validate(e)) == IndexSet{{"a", Variance::Lower}});
  }
}

TEST_SUITE("christoffel") {
  TEST_CASE("needs a metric") {
    CHECK(code_of([] { christoffel("i", "j", "k", Context{}); }) == ErrorCode::NoMetric);
  }

  TEST_CASE("shape and symmetry") {
    Context ctx = metric_context();
    Expression c = christoffel("i", "j", "k", ctx);
    CHECK(c.terms.size() == 3);
    CHECK(free_indices(validate(c)) ==
          IndexSet{{"i", Variance::Lower}, {"j", Variance::Lower}, {"k", Variance::Upper}});
    CHECK(canform(c - christoffel("j", "i", "k", ctx), ctx).is_zero());
  }

  TEST_CASE("vanishes numerically for a flat metric") {
    Context ctx = metric_context();
    ComponentAssignment a(2, 4, ctx);
    a.set_flat_metric(true);
    Expression c = christoffel("i", "j", "k", ctx);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(numeric_eval(c, a, {{"i", i}, {"j", j}, {"k", k}}) == 0.0);
  }

  TEST_CASE("matches the matrix formula for a curved metric") {
    Context ctx = metric_context();
    ComponentAssignment a(2, 8, ctx);
    Expression c = christoffel("i", "j", "k", ctx);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double want = 0;
          for (int s = 0; s < 2; ++s) {
            double ginv = a.value(make_tensor("g", {}, {"k", "s"}), {k, s});
            want += 0.5 * ginv *
                    (a.component("g", 2, 1, {i, s, j}) + a.component("g", 2, 1, {j, s, i}) -
                     a.component("g", 2, 1, {i, j, s}));
          }
          CHECK(testing::close(numeric_eval(c, a, {{"i", i}, {"j", j}, {"k", k}}), want, 1e-12));
        }
  }
}

TEST_SUITE("covdiff") {
  TEST_CASE("expanded vector derivative") {
    Context ctx = metric_context();
    Expression got = canform(covdiff(P("v([],[i])"), "j", CovdiffMode::Expanded, ctx), ctx);
    Expression want = canform(P("v([],[i],j) + ichr2([j,d],[i])*v([],[d])"), ctx);
    CHECK(got == want);
  }

  TEST_CASE("a scalar just gets a partial") {
    Context ctx = metric_context();
    CHECK(covdiff(P("phi"), "i", CovdiffMode::Expanded, ctx) == P("phi([],[],i)"));
  }

  TEST_CASE("metric compatibility") {
    Context ctx = metric_context();
    Expression e = expand_christoffels(covdiff(P("g([a,b],[])"), "k", CovdiffMode::Expanded, ctx), ctx);
    CHECK(canform(contract(e, ctx), ctx).is_zero());
    ComponentAssignment a(2, 21, ctx);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int k = 0; k < 2; ++k)
          CHECK(std::abs(numeric_eval(e, a, {{"a", x}, {"b", y}, {"k", k}})) < 1e-12);
  }

  TEST_CASE("expanded mode needs a metric") {
    CHECK(code_of([] { covdiff(P("v([],[i])"), "j", CovdiffMode::Expanded, Context{}); }) ==
          ErrorCode::NoMetric);
  }

  TEST_CASE("inert mode is term-wise") {
    Expression eq = P("j([],[m]) + 'covdiff(F([],[m,n]),n)");
    Expression got = covdiff_inert(eq, "m");
    CHECK(got == P("'covdiff(j([],[m]),m) + 'covdiff('covdiff(F([],[m,n]),n),m)"));
    CHECK(covdiff_inert(eq, "m") == covdiff(eq, "m", CovdiffMode::Inert, Context{}));
  }

  TEST_CASE("inert derivative of a product is a group") {
    Expression e = covdiff_inert(P("g([],[a,b])*phi([],[],b)"), "a");
    REQUIRE(e.terms.size() == 1);
    CHECK(e.terms[0].factors.at(0).is_group());
    CHECK(free_indices(validate(e)).empty());
  }
}

TEST_SUITE("extdiff") {
  TEST_CASE("rank 0 and rank 1") {
    Context ctx;
    CHECK(extdiff(P("phi"), "k", ctx) == P("phi([],[],k)"));
    CHECK(extdiff(P("A([m],[])"), "n", ctx) == canform(P("A([n],[],m) - A([m],[],n)"), ctx));
  }

  TEST_CASE("rank 2 cyclic sum") {
    Context ctx;
    decsym(ctx, "F", 2, 0, {{BlockKind::Antisymmetric, {}, true}}, {});
    Expression got = extdiff(P("F([m,n],[])"), "k", ctx);
    CHECK(got == canform(P("F([m,n],[],k) + F([n,k],[],m) + F([k,m],[],n)"), ctx));
  }

  TEST_CASE("d of d vanishes") {
    Context ctx;
    CHECK(extdiff(extdiff(P("theta"), "a", ctx), "b", ctx).is_zero());
    Context c2;
    c2.components["F"] = {make_tensor("F", {"m", "n"}, {}), P("A([n],[],m) - A([m],[],n)")};
    CHECK(extdiff(substitute_components(P("F([m,n],[])"), c2), "k", c2).is_zero());
  }

  TEST_CASE("half-weight convention") {
    Context ctx;
    ctx.geowedge = false;
    CHECK(extdiff(P("A([m],[])"), "n", ctx) == canform(P("1/2*A([n],[],m) - 1/2*A([m],[],n)"), ctx));
  }

  TEST_CASE("rejects non-forms") {
    Context ctx;
    CHECK(code_of([&] { extdiff(P("v([],[m])"), "n", ctx); }) == ErrorCode::NotAntisymmetric);
    CHECK(code_of([&] { extdiff(P("T([m,n],[])"), "k", ctx); }) == ErrorCode::NotAntisymmetric);
  }
}

TEST_SUITE("fdiff") {
  TEST_CASE("derivative jet matched to deltas") {
    Context ctx;
    Expression got = fdiff(P("A([l],[],k)"), make_tensor("A", {"m"}, {}, {"n"}));
    CHECK(got == Expression(make_kdelta("m", "l")) * Expression(make_kdelta("n", "k")));
  }

  TEST_CASE("source term gives the current") {
    Context ctx;
    ctx.set_metric("g");
    Expression got = contract(fdiff(P("j([k],[])*A([l],[])*g([],[k,l])"), make_tensor("A", {"m"}, {})), ctx);
    CHECK(canform(got, ctx) == P("j([],[m])"));
  }

  TEST_CASE("non-matching factors are constants") {
    CHECK(fdiff(P("A([l],[])"), make_tensor("A", {"m"}, {}, {"n"})).is_zero());
    CHECK(fdiff(P("B([l],[],k)"), make_tensor("A", {"m"}, {}, {"n"})).is_zero());
  }

  TEST_CASE("pattern labels must not be free in the expression") {
    CHECK(code_of([] { fdiff(P("A([m],[],k)"), make_tensor("A", {"m"}, {}, {"n"})); }) ==
          ErrorCode::PatternIndexCollision);
  }

  TEST_CASE("Maxwell momentum through the component definition") {
    Context ctx;
    ctx.set_metric("g");
    define_components(ctx, make_tensor("F", {"m", "n"}, {}), P("A([n],[],m) - A([m],[],n)"));
    Expression L = expand(P("-1/4*F([k,l],[])*F([a,b],[])*g([],[k,a])*g([],[l,b])"), ctx);
    Expression d = canform(contract(fdiff(L, make_tensor("A", {"m"}, {}, {"n"})), ctx), ctx);
    Expression want = substitute_components(P("F([],[m,n])"), ctx);
    ComponentAssignment a(2, 13, ctx);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n)
        CHECK(testing::close(numeric_eval(d, a, {{"m", m}, {"n", n}}), numeric_eval(want, a, {{"m", m}, {"n", n}}),
                             1e-10));
  }

  TEST_CASE("finite-difference oracle on random scalars") {
    Context ctx = testing::random_context();
    testing::RandomExpressions gen(seed_from_environment(23));
    const Factor target = make_tensor("A", {"m"}, {}, {"n"});
    int checked = 0;
    for (int k = 0; k < 200 && checked < 25; ++k) {
      Expression e = gen.expression();
      if (!free_indices(e).empty() || !lower_jets_only(e)) continue;
      ++checked;
      Expression d = fdiff(e, target);
      ComponentAssignment a(2, 77 + k, ctx);
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
          const double h = 1e-5;
          const double x0 = a.component("A", 1, 1, {m, n});
          a.set_component("A", 1, 1, {m, n}, x0 + h);
          const double up = numeric_eval(e, a);
          a.set_component("A", 1, 1, {m, n}, x0 - h);
          const double down = numeric_eval(e, a);
          a.set_component("A", 1, 1, {m, n}, x0);
          INFO(render(e));
          CHECK(testing::close(numeric_eval(d, a, {{"m", m}, {"n", n}}), (up - down) / (2 * h), 1e-6));
        }
    }
    CHECK(checked > 5);
  }
}
