#include <doctest.h>

#include "indicial/parser.hpp"
#include "indicial/printer.hpp"
#include "random_expr.hpp"

#include <json.hpp>

using namespace indicial;

TEST_CASE("plain rendering of slots and derivatives") {
  CHECK(render(parse_expression("T([a,b],[c,i],i2,i1)")) == "T_{a b,i2 i1}^{c i}");
  CHECK(render(parse_expression("j([],[m]) + 'covdiff(F([],[m,n]),n)")) == "j^{m} + F^{m n}_{;n}");
  CHECK(render(Expression()) == "0");
  CHECK(render(parse_expression("-1/4*x([a],[])*y([],[a])")) == "-1/4 x_{a} y^{a}");
  CHECK(render(parse_expression("x([a],[]) - 2*y([a],[])")) == "x_{a} - 2 y_{a}");
}

TEST_CASE("latex rendering escapes generated labels") {
  Expression e = rename_dummies(parse_expression("x([a],[])*y([],[a])"));
  std::string s = render(e, Format::Latex);
  CHECK(s.find("\\%1") != std::string::npos);
}

TEST_CASE("json rendering is structured") {
  auto j = nlohmann::json::parse(render(parse_expression("2*A([m],[],n)"), Format::Json));
  REQUIRE(j["terms"].size() == 1);
  CHECK(j["terms"][0]["coeff"] == "2");
  CHECK(j["terms"][0]["factors"][0]["name"] == "A");
  CHECK(j["terms"][0]["factors"][0]["derivs"][0]["label"] == "n");
}

TEST_CASE("parse(render(e)) == e over random expressions") {
  testing::RandomExpressions gen(seed_from_environment(17));
  for (int k = 0; k < 200; ++k) {
    Expression e = rename_dummies(gen.expression());
    INFO(render(e));
    CHECK(parse_expression(render(e)) == e);
  }
}

TEST_CASE("group factors round-trip") {
  Expression e = parse_expression("'covdiff(x([],[a])*y([b],[]),c)");
  CHECK(parse_expression(render(e)) == e);
}
