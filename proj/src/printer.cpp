#include "indicial/printer.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace indicial {

namespace {

using nlohmann::json;

std::string index_text(const std::string& label, Format format) {
  if (format == Format::Latex && is_generated_label(label)) return "\\" + label;
  return label;
}

std::string join(const std::vector<std::string>& items, Format format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += index_text(items[i], format);
  }
  return out;
}

bool standard_layout(const Factor& f) {
  bool seen_upper = false;
  for (const auto& s : f.slots) {
    if (s.variance == Variance::Upper)
      seen_upper = true;
    else if (seen_upper)
      return false;
  }
  return true;
}

// Derivative slots from `first` on: ',' opens an ordinary run, ';' marks
// each covariant slot.
std::string deriv_text(const std::vector<DerivSlot>& derivs, std::size_t first, Format format) {
  std::string out;
  bool in_ordinary = false;
  for (std::size_t i = first; i < derivs.size(); ++i) {
    const auto& d = derivs[i];
    if (d.kind == DerivKind::Covariant) {
      out += ';';
      in_ordinary = false;
    } else if (in_ordinary) {
      out += ' ';
    } else {
      out += ',';
      in_ordinary = true;
    }
    out += index_text(d.label, format);
  }
  return out;
}

std::string render_factor(const Factor& f, Format format) {
  std::string out;
  if (f.is_group()) {
    out += format == Format::Latex ? "\\left(" : "(";
    for (std::size_t i = 0; i < f.group.size(); ++i) {
      if (i) out += format == Format::Latex ? "\\," : " ";
      out += render_factor(f.group[i], format);
    }
    out += format == Format::Latex ? "\\right)" : ")";
    if (f.has_derivs()) out += "_{" + deriv_text(f.derivs, 0, format) + "}";
    return out;
  }

  out += f.name;
  // `pending_lower` holds the contents of a lower block that is still open,
  // so trailing derivative slots can be merged into it.
  std::string pending_lower;
  bool lower_open = false;
  auto close_lower = [&] {
    if (lower_open) out += "_{" + pending_lower + "}";
    pending_lower.clear();
    lower_open = false;
  };

  std::size_t derivs_done = 0;
  if (standard_layout(f)) {
    auto cov = f.cov();
    auto contra = f.contra();
    if (!cov.empty()) {
      pending_lower = join(cov, format);
      lower_open = true;
      while (derivs_done < f.derivs.size() && f.derivs[derivs_done].kind == DerivKind::Ordinary)
        ++derivs_done;
      if (derivs_done) {
        std::vector<DerivSlot> prefix(f.derivs.begin(), f.derivs.begin() + derivs_done);
        pending_lower += deriv_text(prefix, 0, format);
      }
    }
    if (!contra.empty()) {
      close_lower();
      out += "^{" + join(contra, format) + "}";
    }
  } else {
    std::size_t i = 0;
    while (i < f.slots.size()) {
      auto v = f.slots[i].variance;
      std::vector<std::string> run;
      while (i < f.slots.size() && f.slots[i].variance == v) run.push_back(f.slots[i++].label);
      if (v == Variance::Lower) {
        close_lower();
        pending_lower = join(run, format);
        lower_open = true;
      } else {
        close_lower();
        out += "^{" + join(run, format) + "}";
      }
    }
  }
  if (derivs_done < f.derivs.size()) {
    pending_lower += deriv_text(f.derivs, derivs_done, format);
    lower_open = true;
  }
  close_lower();
  return out;
}

std::string coefficient_prefix(const Rational& c, bool has_factors, Format format) {
  if (has_factors && c == Rational(1)) return "";
  if (has_factors && c == Rational(-1)) return "-";
  std::string text;
  if (format == Format::Latex && c.denominator() != 1) {
    text = (c < 0 ? "-" : "") + std::string("\\frac{") + std::to_string(std::abs(c.numerator())) +
           "}{" + std::to_string(c.denominator()) + "}";
  } else {
    text = render(c);
  }
  return has_factors ? text + (format == Format::Latex ? "\\," : " ") : text;
}

std::string render_term(const Term& t, Format format) {
  std::string out = coefficient_prefix(t.coeff, !t.factors.empty(), format);
  for (std::size_t i = 0; i < t.factors.size(); ++i) {
    if (i) out += format == Format::Latex ? "\\," : " ";
    out += render_factor(t.factors[i], format);
  }
  return out;
}

json factor_json(const Factor& f) {
  json j;
  j["name"] = f.name;
  j["slots"] = json::array();
  for (const auto& s : f.slots)
    j["slots"].push_back(
        {{"label", s.label}, {"variance", s.variance == Variance::Upper ? "upper" : "lower"}});
  j["derivs"] = json::array();
  for (const auto& d : f.derivs)
    j["derivs"].push_back(
        {{"label", d.label}, {"kind", d.kind == DerivKind::Covariant ? "covariant" : "ordinary"}});
  if (f.is_group()) {
    j["group"] = json::array();
    for (const auto& g : f.group) j["group"].push_back(factor_json(g));
  }
  return j;
}

json term_json(const Term& t) {
  json j;
  j["coeff"] = render(t.coeff);
  j["factors"] = json::array();
  for (const auto& f : t.factors) j["factors"].push_back(factor_json(f));
  return j;
}

}  // namespace

std::string render(const Rational& r) {
  std::string out = std::to_string(r.numerator());
  if (r.denominator() != 1) out += "/" + std::to_string(r.denominator());
  return out;
}

std::string render(const Factor& f, Format format) {
  if (format == Format::Json) return factor_json(f).dump();
  return render_factor(f, format);
}

std::string render(const Term& t, Format format) {
  if (format == Format::Json) return term_json(t).dump();
  return render_term(t, format);
}

std::string render(const Expression& e, Format format) {
  if (format == Format::Json) {
    json j;
    j["terms"] = json::array();
    for (const auto& t : e.terms) j["terms"].push_back(term_json(t));
    return j.dump();
  }
  if (e.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    Term t = e.terms[i];
    if (i == 0) {
      out += render_term(t, format);
      continue;
    }
    if (t.coeff < 0) {
      t.coeff = -t.coeff;
      out += " - ";
    } else {
      out += " + ";
    }
    out += render_term(t, format);
  }
  return out;
}

}  // namespace indicial
