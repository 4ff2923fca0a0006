#pragma once

#include "indicial/expr.hpp"

#include <string>

namespace indicial {

enum class Format { Plain, Latex, Json };

/// Single-line rendering. Plain output looks like `T_{a b,i2 i1}^{c i}`
/// and `F^{m n}_{;n}`, and is accepted back by parse_expression.
std::string render(const Expression& e, Format format = Format::Plain);
std::string render(const Term& t, Format format = Format::Plain);
std::string render(const Factor& f, Format format = Format::Plain);
std::string render(const Rational& r);

}  // namespace indicial
