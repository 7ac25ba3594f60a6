#include "folsing/cli/inputs.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "json.hpp"

#include "folsing/errors.hpp"

namespace folsing::cli {

using nlohmann::json;

namespace {

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw ParseError("malformed JSON: " + what, line, column);
  }
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InputError("unknown field '" + key + "' in " + where);
  }
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError("missing field '" + key + "' in " + where);
  return *it;
}

int int_field(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw InputError("field '" + key + "' in " + where + " must be an integer");
  return v.get<int>();
}

double number_value(const json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + " must be a number");
  return v.get<double>();
}

Rational coefficient_value(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw InputError("coefficient in " + where + " must be a string such as \"3/2\" or \"-0.25\", or an integer");
}

}  // namespace

MapJet GermInput::map_jet() const { return MapJet{n, p, order, components}; }

FoliatedJet GermInput::foliated_jet() const {
  if (transverse_dim <= 0 || p != 1) throw InputError("germ input is not a foliated function");
  return FoliatedJet{n - transverse_dim, transverse_dim, order, components.front()};
}

GermInput parse_germ_input(std::string_view text) {
  const json doc = parse_document(text);
  require_object(doc, "germ input");
  reject_unknown(doc, {"n", "p", "order", "components", "transverse_dim"}, "germ input");
  GermInput in;
  in.n = int_field(doc, "n", "germ input");
  in.p = int_field(doc, "p", "germ input");
  in.order = int_field(doc, "order", "germ input");
  if (doc.contains("transverse_dim")) in.transverse_dim = int_field(doc, "transverse_dim", "germ input");
  if (in.n < 1 || in.p < 1) throw InputError("germ input needs n >= 1 and p >= 1");
  if (in.order < 1) throw InputError("germ input needs order >= 1");
  if (in.transverse_dim < 0 || in.transverse_dim >= in.n) {
    throw InputError("transverse_dim must satisfy 0 <= transverse_dim < n");
  }
  if (in.transverse_dim > 0 && in.p != 1) throw InputError("a foliated germ input must have p = 1");

  const json& comps = field(doc, "components", "germ input");
  if (!comps.is_array() || static_cast<int>(comps.size()) != in.p) {
    throw InputError("components must be an array of p components");
  }
  const RingDims ring{in.n, in.order};
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const std::string where = "component " + std::to_string(c + 1);
    if (!comps[c].is_array()) throw InputError(where + " must be an array of terms");
    TruncatedPoly poly(ring);
    for (const auto& term : comps[c]) {
      require_object(term, "a term of " + where);
      reject_unknown(term, {"exponents", "coefficient"}, "a term of " + where);
      const json& e = field(term, "exponents", where);
      if (!e.is_array() || static_cast<int>(e.size()) != in.n) {
        throw InputError("exponent vector in " + where + " must have length n");
      }
      std::vector<int> exps;
      for (const auto& x : e) {
        if (!x.is_number_integer() || x.get<long>() < 0) {
          throw InputError("exponents in " + where + " must be nonnegative integers");
        }
        exps.push_back(x.get<int>());
      }
      const Monomial m(exps);
      if (m.degree() > in.order) throw InputError("a term of " + where + " exceeds the jet order");
      poly.add_term(m, coefficient_value(field(term, "coefficient", where), where));
    }
    in.components.push_back(std::move(poly));
  }
  in.map_jet().validate();
  return in;
}

ChartInput parse_chart_input(std::string_view text) {
  const json doc = parse_document(text);
  require_object(doc, "chart input");
  reject_unknown(doc, {"n", "q", "box", "expression", "metric", "declared_proper", "grid", "flow_grid", "tolerances"},
                 "chart input");
  ChartInput in;
  in.chart.leaf_dim = int_field(doc, "n", "chart input");
  in.chart.transverse_dim = doc.contains("q") ? int_field(doc, "q", "chart input") : 0;
  const int dims = in.chart.dims();
  const json& box = field(doc, "box", "chart input");
  if (!box.is_array() || static_cast<int>(box.size()) != dims) {
    throw InputError("box must list one [lo, hi] pair per variable");
  }
  for (const auto& iv : box) {
    if (!iv.is_array() || iv.size() != 2) throw InputError("box entries must be [lo, hi] pairs");
    in.chart.box.push_back({number_value(iv[0], "box bound"), number_value(iv[1], "box bound")});
  }
  in.chart.validate();

  const json& expr = field(doc, "expression", "chart input");
  if (!expr.is_string()) throw InputError("expression must be a string");
  in.expression = expr.get<std::string>();
  try {
    in.expr = parse_expression(in.expression, in.chart.leaf_dim, in.chart.transverse_dim);
  } catch (const ParseError& e) {
    throw ParseError("in expression: " + e.detail(), e.line(), e.column());
  }

  if (doc.contains("metric")) {
    const json& m = doc["metric"];
    if (!m.is_array() || static_cast<int>(m.size()) != in.chart.leaf_dim) {
      throw InputError("metric must be an n x n array of expression strings");
    }
    std::vector<std::vector<Expr>> entries;
    for (const auto& row : m) {
      if (!row.is_array() || static_cast<int>(row.size()) != in.chart.leaf_dim) {
        throw InputError("metric must be an n x n array of expression strings");
      }
      std::vector<Expr> r;
      for (const auto& e : row) {
        if (!e.is_string()) throw InputError("metric entries must be expression strings");
        try {
          r.push_back(parse_expression(e.get<std::string>(), in.chart.leaf_dim, in.chart.transverse_dim));
        } catch (const ParseError& pe) {
          throw ParseError("in metric entry: " + pe.detail(), pe.line(), pe.column());
        }
      }
      entries.push_back(std::move(r));
    }
    in.metric = MetricSpec(std::move(entries));
    in.metric.validate(in.chart);
  }

  if (doc.contains("declared_proper")) {
    if (!doc["declared_proper"].is_boolean()) throw InputError("declared_proper must be a boolean");
    in.declared_proper = doc["declared_proper"].get<bool>();
  }

  auto read_grid = [&](const char* key, int& leaf, int& transverse) {
    if (!doc.contains(key)) return;
    const json& g = doc[key];
    require_object(g, key);
    reject_unknown(g, {"leaf", "transverse"}, key);
    if (g.contains("leaf")) leaf = int_field(g, "leaf", key);
    if (g.contains("transverse")) transverse = int_field(g, "transverse", key);
    if (leaf < 1 || transverse < 1) throw InputError(std::string(key) + " densities must be positive");
  };
  read_grid("grid", in.search.leaf_density, in.search.transverse_density);
  read_grid("flow_grid", in.flow_grid.leaf_density, in.flow_grid.transverse_density);

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    require_object(t, "tolerances");
    reject_unknown(t,
                   {"residual", "dedup_radius", "eigenvalue", "flow_error", "gradient_stop", "max_time", "max_steps",
                    "epsilon", "confinement"},
                   "tolerances");
    auto positive = [&](const char* key, double& target) {
      if (!t.contains(key)) return;
      target = number_value(t[key], std::string("tolerance '") + key + "'");
      if (!(target > 0.0)) throw InputError(std::string("tolerance '") + key + "' must be positive");
    };
    positive("residual", in.search.residual_tolerance);
    positive("dedup_radius", in.search.dedup_radius);
    positive("eigenvalue", in.search.eigenvalue_threshold);
    positive("flow_error", in.budget.error_tolerance);
    positive("gradient_stop", in.budget.gradient_stop);
    positive("max_time", in.budget.max_time);
    positive("epsilon", in.epsilon);
    positive("confinement", in.confinement_tolerance);
    if (t.contains("max_steps")) {
      if (!t["max_steps"].is_number_unsigned() || t["max_steps"].get<std::size_t>() == 0) {
        throw InputError("tolerance 'max_steps' must be a positive integer");
      }
      in.budget.max_steps = t["max_steps"].get<std::size_t>();
    }
  }
  return in;
}

}  // namespace folsing::cli
