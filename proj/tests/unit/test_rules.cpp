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

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an indicial::Error");
  return ErrorCode::InvalidArgument;
}

Context maxwell_context() {
  Context ctx;
  ctx.set_metric("g");
  define_components(ctx, make_tensor("F", {"m", "n"}, {}), extdiff(P("A([m],[])"), "n", ctx));
  return ctx;
}

}  // namespace

TEST_SUITE("components") {
  TEST_CASE("substitution maps indices and raises through the metric") {
    Context ctx = maxwell_context();
    CHECK(canform(substitute_components(P("F([a,b],[])"), ctx), ctx) ==
          canform(P("A([b],[],a) - A([a],[],b)"), ctx));
    Expression up = substitute_components(P("F([],[m,n])"), ctx);
    ComponentAssignment a(2, 6, ctx);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) {
        double want = 0;
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q)
            want += a.value(make_tensor("g", {}, {"m", "p"}), {m, p}) *
                    a.value(make_tensor("g", {}, {"n", "q"}), {n, q}) *
                    (a.component("A", 1, 1, {q, p}) - a.component("A", 1, 1, {p, q}));
        CHECK(testing::close(numeric_eval(up, a, {{"m", m}, {"n", n}}), want, 1e-10));
      }
  }

  TEST_CASE("the expanded Lagrangian has the product-of-differences shape") {
    Context ctx = maxwell_context();
    Expression L = expand(P("-1/4*F([k,l],[])*F([a,b],[])*g([],[k,a])*g([],[l,b])+j([k],[])*A([l],[])*g([],[k,l])"), ctx);
    CHECK(L.terms.size() == 5);
  }

  TEST_CASE("remcomps makes the tensor opaque again") {
    Context ctx = maxwell_context();
    CHECK(remcomps(ctx, "F"));
    CHECK_FALSE(remcomps(ctx, "F"));
    CHECK(expand(P("F([m,n],[])"), ctx) == P("F([m,n],[])"));
  }

  TEST_CASE("definition must match the signature") {
    Context ctx;
    CHECK(code_of([&] { define_components(ctx, make_tensor("F", {"m", "n"}, {}), P("A([m],[],k)")); }) ==
          ErrorCode::SignatureMismatch);
  }

  TEST_CASE("self-referential definitions hit the depth cap") {
    Context ctx;
    define_components(ctx, make_tensor("X", {"m"}, {}), P("2*X([m],[])"));
    CHECK(code_of([&] { substitute_components(P("X([a],[])"), ctx); }) == ErrorCode::IterationCapExceeded);
  }
}

TEST_SUITE("rules") {
  TEST_CASE("Maxwell rule rewrites an antisymmetrized derivative") {
    Context ctx = testing::random_context();
    CHECK(apply1(P("A([b],[],a) - A([a],[],b)"), "Maxwell", ctx) == P("F([a,b],[])"));
    CHECK(apply1(P("A([n],[],m) - A([m],[],n)"), "Maxwell", ctx) == P("F([m,n],[])"));
    Expression two = P("x([],[m,n])*A([n],[],m) - x([],[m,n])*A([m],[],n)");
    CHECK(apply1(two, "Maxwell", ctx) == canform(P("x([],[m,n])*F([m,n],[])"), ctx));
  }

  TEST_CASE("single-term rule with nested inert derivatives") {
    Context ctx;
    decsym(ctx, "F", 2, 0, {{BlockKind::Antisymmetric, {}, true}}, {});
    matchdeclare(ctx, {"a", "b"});
    defrule(ctx, "CC", P("'covdiff('covdiff(F([],[a,b]),b),a)"), Expression());
    CHECK(apply1(P("'covdiff('covdiff(F([],[a,b]),b),a)"), "CC", ctx).is_zero());
    CHECK(apply1(P("'covdiff('covdiff(F([],[m,n]),n),m) + 'covdiff(j([],[m]),m)"), "CC", ctx) ==
          canform(P("'covdiff(j([],[m]),m)"), ctx));
  }

  TEST_CASE("non-matching expressions are returned unchanged") {
    Context ctx = testing::random_context();
    Expression e = P("x([a],[])*y([],[a])");
    CHECK(apply1(e, "Maxwell", ctx) == e);
  }

  TEST_CASE("identity rule leaves expressions fixed") {
    Context ctx;
    matchdeclare(ctx, {"p"});
    defrule(ctx, "Id", P("x([p],[])"), P("x([p],[])"));
    Expression e = P("x([a],[])*y([],[a])");
    CHECK(canform(apply1(e, "Id", ctx), ctx) == canform(e, ctx));
  }

  TEST_CASE("undeclared labels match literally") {
    Context ctx;
    defrule(ctx, "Lit", P("x([q],[])"), P("y([q],[])"));
    CHECK(apply1(P("x([q],[])"), "Lit", ctx) == P("y([q],[])"));
    CHECK(apply1(P("x([r],[])"), "Lit", ctx) == P("x([r],[])"));
  }

  TEST_CASE("re-declaring metavariables is harmless") {
    Context ctx;
    matchdeclare(ctx, {"a"});
    matchdeclare(ctx, {"a"});
    CHECK(ctx.metavariables.size() == 1);
  }

  TEST_CASE("replacement may only use bound metavariables") {
    Context ctx;
    matchdeclare(ctx, {"a", "b"});
    CHECK(code_of([&] { defrule(ctx, "Bad", P("x([a],[])"), P("y([b],[])")); }) ==
          ErrorCode::UnboundMetavariable);
  }

  TEST_CASE("unknown rule name") {
    CHECK(code_of([] { apply1(P("x([a],[])"), "Nope", Context{}); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("a rule that regrows its pattern hits the cap") {
    Context ctx;
    matchdeclare(ctx, {"a"});
    defrule(ctx, "Grow", P("x([a],[])"), P("x([a],[]) + y([a],[])"));
    CHECK(code_of([&] { apply1(P("x([c],[])"), "Grow", ctx); }) == ErrorCode::IterationCapExceeded);
  }

  TEST_CASE("Maxwell is numerically sound when F is tied to A") {
    Context ctx = testing::random_context();
    testing::RandomExpressions gen(seed_from_environment(31));
    ComponentAssignment a(2, 41, ctx);
    testing::tie_field_strength(a);
    int fired = 0;
    for (int k = 0; k < 100; ++k) {
      Expression e = gen.expression();
      Expression r = apply1(e, "Maxwell", ctx);
      if (!(r == e)) ++fired;
      INFO(render(e));
      CHECK(testing::all_close(testing::evaluate_all(e, a), testing::evaluate_all(r, a), 1e-9));
    }
    CHECK(fired > 0);
  }
}
