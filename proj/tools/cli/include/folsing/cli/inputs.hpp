#pragma once

// JSON input documents for the command-line tool.

#include <string_view>
#include <vector>

#include "folsing/boardman.hpp"
#include "folsing/flow.hpp"
#include "folsing/folchart.hpp"

namespace folsing::cli {

/// A polynomial map jet. When transverse_dim > 0 the last transverse_dim of
/// the n variables are transverse and the jet is read as a foliated function
/// (p must then be 1).
struct GermInput {
  int n = 0;
  int p = 0;
  int order = 0;
  int transverse_dim = 0;
  std::vector<TruncatedPoly> components;

  MapJet map_jet() const;
  FoliatedJet foliated_jet() const;
};

struct ChartInput {
  ChartSpec chart;
  std::string expression;
  Expr expr;
  MetricSpec metric;
  bool declared_proper = false;
  CriticalSearchOptions search;
  GridSpec flow_grid;
  FlowBudget budget;
  double epsilon = 1e-3;
  double confinement_tolerance = 1e-6;
};

/// Both parsers reject unknown fields and report JSON syntax errors with a
/// line and column (ParseError); schema violations raise InputError.
GermInput parse_germ_input(std::string_view text);
ChartInput parse_chart_input(std::string_view text);

}  // namespace folsing::cli
