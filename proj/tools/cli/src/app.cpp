#include "folsing/cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "folsing/boardman.hpp"
#include "folsing/cli/inputs.hpp"
#include "folsing/errors.hpp"
#include "folsing/flow.hpp"
#include "folsing/folchart.hpp"
#include "folsing/germ.hpp"

namespace folsing::cli {

using ojson = nlohmann::ordered_json;

namespace {

// ------------------------------------------------------------- reporting

struct Report {
  ojson doc;
  std::string table;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  /// Complete CSV text; overrides header/rows when set.
  std::optional<std::string> csv_text;
  int exit_code = kSuccess;
};

std::string short_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.10g", x);
  return buffer;
}

ojson symbol_json(const BoardmanSymbol& s) { return ojson(s.entries()); }

ojson point_json(const std::vector<double>& p) { return ojson(p); }

std::string point_text(const std::vector<double>& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ", " : "") + short_double(p[i]);
  return out + ")";
}

std::string render_csv(const Report& r) {
  if (r.csv_text) return *r.csv_text;
  std::ostringstream out;
  for (std::size_t i = 0; i < r.csv_header.size(); ++i) out << (i ? "," : "") << csv_field(r.csv_header[i]);
  out << "\r\n";
  for (const auto& row : r.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\r\n";
  }
  return out.str();
}

// --------------------------------------------------------------- helpers

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read input file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item = text.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size() || !std::isfinite(value)) {
      throw InputError("malformed number '" + item + "' in " + what);
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

SliceSpec parse_slice(const std::string& text) {
  const auto v = parse_number_list(text, "--slice");
  if (v.size() != 2) throw InputError("--slice expects a,b");
  SliceSpec s{v[0], v[1]};
  s.validate();
  return s;
}

ojson signature_json(const Signature& s) { return ojson{{"d_plus", s.plus}, {"d_minus", s.minus}, {"d_zero", s.zero}}; }

ojson record_json(const CriticalPointRecord& r) {
  ojson j;
  j["location"] = point_json(r.location);
  j["leafwise_gradient_norm"] = r.leafwise_gradient_norm;
  ojson h = ojson::array();
  for (Eigen::Index i = 0; i < r.foliated_hessian.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index k = 0; k < r.foliated_hessian.cols(); ++k) row.push_back(r.foliated_hessian(i, k));
    h.push_back(row);
  }
  j["foliated_hessian"] = h;
  j["eigenvalues"] = r.eigenvalues;
  j["signature"] = signature_json(r.signature);
  if (r.exact_location) {
    ojson e = ojson::array();
    for (const auto& x : *r.exact_location) e.push_back(format_rational(x));
    j["exact_location"] = e;
  } else {
    j["exact_location"] = nullptr;
  }
  j["symbol"] = r.symbol ? symbol_json(*r.symbol) : ojson(nullptr);
  j["stratum_label"] = r.stratum_label.to_string();
  j["is_leafwise_max"] = r.is_leafwise_max;
  return j;
}

std::string status_text(const Trajectory& tr) {
  std::string s = to_string(tr.status);
  if (tr.degenerate_limit) s += " (degenerate limit)";
  if (tr.step_underflow) s += " (step-size underflow)";
  return s;
}

ojson trajectory_summary_json(const Trajectory& tr) {
  ojson j;
  j["direction"] = to_string(tr.direction);
  j["status"] = to_string(tr.status);
  j["degenerate_limit"] = tr.degenerate_limit;
  j["step_underflow"] = tr.step_underflow;
  j["limit"] = tr.limit ? point_json(*tr.limit) : ojson(nullptr);
  j["steps"] = tr.samples.empty() ? 0 : tr.samples.size() - 1;
  return j;
}

// ------------------------------------------------------------ jet commands

struct JetFlags {
  std::string input;
  int working_order = 0;
  int max_k = 0;
  int k = 0;
  int strata_n = 0;
  int strata_p = 0;
  int strata_k = 0;
  long long max_codim = 0;
};

TruncatedPoly single_function(const GermInput& in) {
  if (in.p != 1) throw InputError("this command needs a function germ (p = 1)");
  return in.components.front();
}

Report jet_symbol(const JetFlags& flags) {
  const GermInput in = parse_germ_input(read_file(flags.input));
  Report r;
  r.doc["command"] = "jet symbol";
  r.doc["n"] = in.n;
  r.doc["p"] = in.p;
  r.doc["order"] = in.order;
  BoardmanSymbol symbol;
  std::ostringstream table;
  if (in.transverse_dim > 0) {
    const FoliatedJet fj = in.foliated_jet();
    const FoliatedSymbols both = foliated_symbol_pipelines(fj);
    const bool agree = both.leafwise == both.map_jet;
    symbol = both.leafwise;
    r.doc["symbol"] = symbol.to_string();
    r.doc["entries"] = symbol_json(symbol);
    r.doc["foliated"] = ojson{{"leaf_dim", fj.leaf_dim},
                              {"transverse_dim", fj.transverse_dim},
                              {"leafwise", both.leafwise.to_string()},
                              {"map_jet", both.map_jet.to_string()},
                              {"agree", agree}};
    table << "symbol        " << symbol.to_string() << "\n";
    table << "leafwise      " << both.leafwise.to_string() << "\n";
    table << "augmented map " << both.map_jet.to_string() << "\n";
    table << "pipelines     " << (agree ? "agree" : "DISAGREE") << "\n";
    if (!agree) r.exit_code = kInternalError;
  } else {
    symbol = boardman_symbol(in.map_jet());
    r.doc["symbol"] = symbol.to_string();
    r.doc["entries"] = symbol_json(symbol);
    table << "symbol " << symbol.to_string() << "\n";
  }
  r.table = table.str();
  r.csv_header = {"symbol"};
  r.csv_rows = {{symbol.to_string()}};
  return r;
}

Report jet_codim(const JetFlags& flags) {
  const GermInput in = parse_germ_input(read_file(flags.input));
  const TruncatedPoly f = single_function(in);
  const int w = flags.working_order > 0 ? flags.working_order : default_working_order(f);
  const int max_k = flags.max_k > 0 ? flags.max_k : in.order;
  const GermReport g = germ_report(f, w, max_k);
  Report r;
  r.doc["command"] = "jet codim";
  r.doc["working_order"] = w;
  if (g.jacobian_codim.value) {
    r.doc["jacobian_codim"] = *g.jacobian_codim.value;
  } else {
    r.doc["jacobian_codim"] = "infinite-at-order-" + std::to_string(w);
  }
  r.doc["sequence"] = g.jacobian_codim.sequence;
  r.doc["determinacy_bound"] = g.determinacy_bound ? ojson(*g.determinacy_bound) : ojson(nullptr);
  r.doc["isolated_certified"] = g.isolated_certified;
  ojson zk = ojson::object();
  for (const auto& [k, member] : g.zk_flags) zk[std::to_string(k)] = member;
  r.doc["zk"] = zk;

  std::ostringstream t;
  t << "jacobian codim     "
    << (g.jacobian_codim.value ? std::to_string(*g.jacobian_codim.value) : "infinite-at-order-" + std::to_string(w))
    << "\n";
  t << "determinacy bound  " << (g.determinacy_bound ? std::to_string(*g.determinacy_bound) : "none") << "\n";
  t << "isolated           " << (g.isolated_certified ? "certified" : "not certified") << "\n";
  for (const auto& [k, member] : g.zk_flags) t << "in Z^" << k << "             " << (member ? "yes" : "no") << "\n";
  r.table = t.str();
  r.csv_header = {"field", "value"};
  r.csv_rows.push_back({"jacobian_codim", g.jacobian_codim.value ? std::to_string(*g.jacobian_codim.value)
                                                                  : "infinite-at-order-" + std::to_string(w)});
  r.csv_rows.push_back({"determinacy_bound", g.determinacy_bound ? std::to_string(*g.determinacy_bound) : ""});
  r.csv_rows.push_back({"isolated_certified", g.isolated_certified ? "true" : "false"});
  for (const auto& [k, member] : g.zk_flags) r.csv_rows.push_back({"zk_" + std::to_string(k), member ? "true" : "false"});
  return r;
}

Report jet_zk(const JetFlags& flags) {
  const GermInput in = parse_germ_input(read_file(flags.input));
  const TruncatedPoly f = single_function(in);
  const ZkPaths paths = zk_paths(f, flags.k);
  const bool agree = paths.by_dimension == paths.by_codim;
  Report r;
  r.doc["command"] = "jet zk";
  r.doc["k"] = flags.k;
  r.doc["span_dimension"] = paths.span_dimension;
  r.doc["threshold"] = paths.threshold;
  r.doc["by_dimension"] = paths.by_dimension;
  r.doc["stabilized_codim"] = paths.codim.value ? ojson(*paths.codim.value) : ojson(nullptr);
  r.doc["by_codim"] = paths.by_codim;
  r.doc["agree"] = agree;
  r.doc["member"] = paths.by_dimension;
  std::ostringstream t;
  t << "Z^" << flags.k << " member   " << (paths.by_dimension ? "yes" : "no") << "\n";
  t << "span dim      " << paths.span_dimension << " (threshold " << paths.threshold << ")\n";
  t << "stabilized    " << (paths.codim.value ? std::to_string(*paths.codim.value) : "not stabilized") << "\n";
  t << "paths         " << (agree ? "agree" : "DISAGREE") << "\n";
  r.table = t.str();
  r.csv_header = {"k", "member", "span_dimension", "threshold", "agree"};
  r.csv_rows = {{std::to_string(flags.k), paths.by_dimension ? "true" : "false", std::to_string(paths.span_dimension),
                 std::to_string(paths.threshold), agree ? "true" : "false"}};
  if (!agree) r.exit_code = kInternalError;
  return r;
}

Report jet_strata(const JetFlags& flags) {
  const auto strata = enumerate_symbols(flags.strata_n, flags.strata_p, flags.strata_k, flags.max_codim);
  Report r;
  r.doc["command"] = "jet strata";
  r.doc["n"] = flags.strata_n;
  r.doc["p"] = flags.strata_p;
  r.doc["k"] = flags.strata_k;
  r.doc["max_codim"] = flags.max_codim;
  ojson list = ojson::array();
  std::ostringstream t;
  t << std::left << std::setw(16) << "symbol" << "codim\n";
  r.csv_header = {"symbol", "codim"};
  for (const auto& s : strata) {
    list.push_back(ojson{{"symbol", s.symbol.to_string()}, {"codim", s.codim}});
    t << std::left << std::setw(16) << s.symbol.to_string() << s.codim << "\n";
    r.csv_rows.push_back({s.symbol.to_string(), std::to_string(s.codim)});
  }
  r.doc["strata"] = list;
  r.table = t.str();
  return r;
}

// ------------------------------------------------------------ fol commands

struct FolFlags {
  std::string input;
  std::string start;
  std::string direction = "forward";
  std::string slice;
  int d = 1;
  double radius = 0.5;
  int samples = 16;
  std::optional<double> residual;
  std::optional<double> dedup;
  std::optional<double> eigenvalue;
  std::optional<double> flow_error;
  std::optional<double> gradient_stop;
  std::optional<double> max_time;
  std::optional<std::size_t> max_steps;
  std::optional<double> epsilon;
  std::optional<double> confinement;
  std::optional<int> grid_leaf;
  std::optional<int> grid_transverse;
};

ChartInput load_chart(const FolFlags& flags) {
  ChartInput in = parse_chart_input(read_file(flags.input));
  if (flags.residual) in.search.residual_tolerance = *flags.residual;
  if (flags.dedup) in.search.dedup_radius = *flags.dedup;
  if (flags.eigenvalue) in.search.eigenvalue_threshold = *flags.eigenvalue;
  if (flags.flow_error) in.budget.error_tolerance = *flags.flow_error;
  if (flags.gradient_stop) in.budget.gradient_stop = *flags.gradient_stop;
  if (flags.max_time) in.budget.max_time = *flags.max_time;
  if (flags.max_steps) in.budget.max_steps = *flags.max_steps;
  if (flags.epsilon) in.epsilon = *flags.epsilon;
  if (flags.confinement) in.confinement_tolerance = *flags.confinement;
  if (flags.grid_leaf) in.search.leaf_density = in.flow_grid.leaf_density = *flags.grid_leaf;
  if (flags.grid_transverse) in.search.transverse_density = in.flow_grid.transverse_density = *flags.grid_transverse;
  return in;
}

void add_chart_header(Report& r, const std::string& command, const ChartInput& in) {
  r.doc["command"] = command;
  r.doc["expression"] = in.expression;
  r.doc["n"] = in.chart.leaf_dim;
  r.doc["q"] = in.chart.transverse_dim;
}

std::vector<std::string> coordinate_header(const ChartSpec& chart) {
  return chart_variable_names(chart.leaf_dim, chart.transverse_dim);
}

Report fol_classify(const FolFlags& flags) {
  const ChartInput in = load_chart(flags);
  const FoliatedFunction f(in.expr, in.chart.leaf_dim, in.chart.transverse_dim);
  const CriticalSearch search = find_critical_points(f, in.chart, in.metric, in.search);
  const GenericityReport gen = genericity_spotcheck(search.records, in.chart.leaf_dim, in.search.dedup_radius);
  Report r;
  add_chart_header(r, "fol classify", in);
  r.doc["seeds"] = search.seeds;
  r.doc["dropped"] = search.dropped;
  ojson recs = ojson::array();
  for (const auto& rec : search.records) recs.push_back(record_json(rec));
  r.doc["records"] = recs;
  ojson degenerate_values = ojson::array();
  for (const auto& v : gen.degenerate_transverse_values) degenerate_values.push_back(point_json(v));
  r.doc["genericity"] = ojson{{"all_isolated", gen.all_isolated},
                              {"degenerate_records", gen.degenerate_records},
                              {"degenerate_transverse_values", degenerate_values},
                              {"degenerate_set_discrete", gen.degenerate_set_discrete}};

  std::ostringstream t;
  t << search.records.size() << " critical points (" << search.seeds << " seeds, " << search.dropped << " dropped)\n";
  for (const auto& rec : search.records) {
    t << "  " << std::left << std::setw(40) << point_text(rec.location) << " " << std::setw(22)
      << rec.stratum_label.to_string() << " sig(" << rec.signature.plus << "," << rec.signature.minus << ","
      << rec.signature.zero << ")" << (rec.exact_location ? " exact" : "") << "\n";
  }
  t << "isolated in leaves: " << (gen.all_isolated ? "yes" : "no") << "; degenerate records: " << gen.degenerate_records
    << "; degenerate set discrete in sweep: " << (gen.degenerate_set_discrete ? "yes" : "no") << "\n";
  r.table = t.str();

  r.csv_header = coordinate_header(in.chart);
  for (const char* h : {"gradient_norm", "d_plus", "d_minus", "d_zero", "stratum", "exact"}) r.csv_header.push_back(h);
  for (const auto& rec : search.records) {
    std::vector<std::string> row;
    for (double x : rec.location) row.push_back(format_double(x));
    row.push_back(format_double(rec.leafwise_gradient_norm));
    row.push_back(std::to_string(rec.signature.plus));
    row.push_back(std::to_string(rec.signature.minus));
    row.push_back(std::to_string(rec.signature.zero));
    row.push_back(rec.stratum_label.to_string());
    row.push_back(rec.exact_location ? "true" : "false");
    r.csv_rows.push_back(std::move(row));
  }
  return r;
}

Report fol_openness(const FolFlags& flags) {
  const ChartInput in = load_chart(flags);
  const FoliatedFunction f(in.expr, in.chart.leaf_dim, in.chart.transverse_dim);
  const OpennessReport rep = openness_check(f, in.chart, in.metric, in.search, in.declared_proper);
  Report r;
  add_chart_header(r, "fol openness", in);
  r.doc["verdict"] = to_string(rep.verdict);
  r.doc["records"] = rep.records;
  r.doc["seeds"] = rep.seeds;
  r.doc["dropped"] = rep.dropped;
  r.doc["properness"] = rep.declared_proper ? "declared by user" : "not declared";
  ojson w = ojson::array();
  for (const auto& rec : rep.witnesses) w.push_back(record_json(rec));
  ojson s = ojson::array();
  for (const auto& rec : rep.suspects) s.push_back(record_json(rec));
  r.doc["witnesses"] = w;
  r.doc["suspects"] = s;

  std::ostringstream t;
  t << "verdict    " << to_string(rep.verdict) << "\n";
  t << "records    " << rep.records << "\n";
  t << "properness " << (rep.declared_proper ? "declared by user" : "not declared") << "\n";
  for (const auto& rec : rep.witnesses) t << "  witness  " << point_text(rec.location) << "\n";
  for (const auto& rec : rep.suspects) t << "  suspect  " << point_text(rec.location) << "\n";
  r.table = t.str();

  r.csv_header = coordinate_header(in.chart);
  r.csv_header.insert(r.csv_header.begin(), "kind");
  for (const auto* group : {&rep.witnesses, &rep.suspects}) {
    for (const auto& rec : *group) {
      std::vector<std::string> row{group == &rep.witnesses ? "witness" : "suspect"};
      for (double x : rec.location) row.push_back(format_double(x));
      r.csv_rows.push_back(std::move(row));
    }
  }
  r.exit_code = rep.verdict == OpennessVerdict::Pass ? kSuccess : kFailVerdict;
  return r;
}

Report fol_flow(const FolFlags& flags) {
  const ChartInput in = load_chart(flags);
  const FoliatedFunction f(in.expr, in.chart.leaf_dim, in.chart.transverse_dim);
  if (flags.start.empty()) throw InputError("fol flow needs --start");
  const auto start = parse_number_list(flags.start, "--start");
  Direction dir;
  if (flags.direction == "forward") {
    dir = Direction::Forward;
  } else if (flags.direction == "backward") {
    dir = Direction::Backward;
  } else {
    throw InputError("--direction must be forward or backward");
  }
  const Trajectory tr = integrate(f, in.metric, in.chart, start, dir, in.budget);
  Report r;
  add_chart_header(r, "fol flow", in);
  r.doc["start"] = point_json(start);
  r.doc["trajectory"] = trajectory_summary_json(tr);
  ojson samples = ojson::array();
  for (const auto& s : tr.samples) samples.push_back(ojson{{"t", s.t}, {"point", s.point}, {"f", s.value}});
  r.doc["samples"] = samples;

  std::ostringstream t;
  t << "direction " << to_string(tr.direction) << "\n";
  t << "status    " << status_text(tr) << "\n";
  t << "steps     " << (tr.samples.size() - 1) << "\n";
  t << "end       " << point_text(tr.samples.back().point) << "  f = " << short_double(tr.samples.back().value)
    << "\n";
  if (tr.limit) t << "limit     " << point_text(*tr.limit) << "\n";
  r.table = t.str();
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  r.csv_text = csv.str();
  return r;
}

Report fol_skeleton(const FolFlags& flags) {
  const ChartInput in = load_chart(flags);
  const FoliatedFunction f(in.expr, in.chart.leaf_dim, in.chart.transverse_dim);
  if (flags.slice.empty()) throw InputError("fol skeleton needs --slice a,b");
  const SliceSpec slice = parse_slice(flags.slice);
  const SkeletonSample sk = skeleton_sample(f, in.metric, in.chart, slice, in.flow_grid, in.budget);
  Report r;
  add_chart_header(r, "fol skeleton", in);
  r.doc["slice"] = ojson::array({slice.a, slice.b});
  r.doc["candidates"] = sk.candidates;
  ojson pts = ojson::array();
  for (const auto& p : sk.points) pts.push_back(ojson{{"start", p.start}, {"limit", p.limit}});
  r.doc["points"] = pts;
  std::ostringstream t;
  t << sk.points.size() << " skeleton points out of " << sk.candidates << " grid points in the slice\n";
  for (const auto& p : sk.points) t << "  " << point_text(p.start) << " -> " << point_text(p.limit) << "\n";
  r.table = t.str();
  const auto names = coordinate_header(in.chart);
  for (const auto& n : names) r.csv_header.push_back(n);
  for (const auto& n : names) r.csv_header.push_back("limit_" + n);
  for (const auto& p : sk.points) {
    std::vector<std::string> row;
    for (double x : p.start) row.push_back(format_double(x));
    for (double x : p.limit) row.push_back(format_double(x));
    r.csv_rows.push_back(std::move(row));
  }
  return r;
}

Report fol_checks(const FolFlags& flags) {
  const ChartInput in = load_chart(flags);
  const FoliatedFunction f(in.expr, in.chart.leaf_dim, in.chart.transverse_dim);
  if (flags.slice.empty()) throw InputError("fol checks needs --slice a,b");
  const SliceSpec slice = parse_slice(flags.slice);
  if (flags.samples < 1) throw InputError("--samples must be positive");
  Report r;
  add_chart_header(r, "fol checks", in);
  r.doc["slice"] = ojson::array({slice.a, slice.b});
  r.doc["d"] = flags.d;
  std::ostringstream t;
  bool all_pass = true;
  r.csv_header = {"check", "result", "measure"};

  ojson conf;
  try {
    const ConfinementReport c =
        confinement_check(f, in.metric, in.chart, flags.d, slice, in.flow_grid, in.confinement_tolerance, in.budget);
    conf = ojson{{"result", c.pass ? "PASS" : "FAIL"},
                 {"tolerance", c.tolerance},
                 {"max_deviation", c.max_deviation},
                 {"skeleton_deviation", c.skeleton_deviation},
                 {"plane_drift", c.plane_drift},
                 {"skeleton_points", c.skeleton_points},
                 {"plane_starts", c.plane_starts}};
    all_pass = all_pass && c.pass;
    t << "confinement " << (c.pass ? "PASS" : "FAIL") << "  max deviation " << short_double(c.max_deviation) << "\n";
    r.csv_rows.push_back({"confinement", c.pass ? "PASS" : "FAIL", format_double(c.max_deviation)});
  } catch (const PreconditionError& e) {
    conf = ojson{{"result", "REJECTED"}, {"reason", e.what()}};
    all_pass = false;
    t << "confinement REJECTED  " << e.what() << "\n";
    r.csv_rows.push_back({"confinement", "REJECTED", ""});
  }
  r.doc["confinement"] = conf;

  ojson ros;
  try {
    const RossiniReport q = rossini_check(f, in.metric, in.chart, flags.d, flags.radius,
                                          static_cast<std::size_t>(flags.samples), in.budget);
    ros = ojson{{"result", q.pass ? "PASS" : "FAIL"},
                {"on_plane_drift", q.on_plane_drift},
                {"on_plane_runs", q.on_plane_runs},
                {"off_plane_runs", q.off_plane_runs},
                {"monotonicity_violations", q.monotonicity_violations},
                {"worst_decrease", q.worst_decrease}};
    all_pass = all_pass && q.pass;
    t << "rossini     " << (q.pass ? "PASS" : "FAIL") << "  drift " << short_double(q.on_plane_drift)
      << ", violations " << q.monotonicity_violations << "\n";
    r.csv_rows.push_back({"rossini", q.pass ? "PASS" : "FAIL", format_double(q.on_plane_drift)});
  } catch (const PreconditionError& e) {
    ros = ojson{{"result", "REJECTED"}, {"reason", e.what()}};
    all_pass = false;
    t << "rossini     REJECTED  " << e.what() << "\n";
    r.csv_rows.push_back({"rossini", "REJECTED", ""});
  }
  r.doc["rossini"] = ros;

  const AltoReport a = alto_dichotomy(f, in.metric, in.chart, slice, in.flow_grid, in.budget, in.epsilon);
  r.doc["alto"] = ojson{{"result", a.pass ? "PASS" : "FAIL"},
                        {"epsilon", a.epsilon},
                        {"points", a.entries.size()},
                        {"reached_below_a", a.reached_below},
                        {"near_skeleton", a.near_skeleton},
                        {"unresolved", a.unresolved}};
  all_pass = all_pass && a.pass;
  t << "alto        " << (a.pass ? "PASS" : "FAIL") << "  below a " << a.reached_below << ", near skeleton "
    << a.near_skeleton << ", unresolved " << a.unresolved << "\n";
  r.csv_rows.push_back({"alto", a.pass ? "PASS" : "FAIL", std::to_string(a.unresolved)});

  r.doc["verdict"] = all_pass ? "PASS" : "FAIL";
  t << "verdict     " << (all_pass ? "PASS" : "FAIL") << "\n";
  r.table = t.str();
  r.exit_code = all_pass ? kSuccess : kFailVerdict;
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"folsing: Thom-Boardman symbols, Jacobian ideals and leafwise Morse analysis on foliated charts"};
  app.name("folsing");
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "table";
  std::string out_path;
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "Write the report to this file instead of standard output");

  JetFlags jf;
  FolFlags ff;
  std::function<Report()> action;

  CLI::App* jet = app.add_subcommand("jet", "Polynomial map jets and germs");
  jet->require_subcommand(1);
  auto* symbol = jet->add_subcommand("symbol", "Boardman symbol (both pipelines for foliated input)");
  symbol->add_option("input", jf.input, "Germ input JSON")->required();
  symbol->callback([&] { action = [&] { return jet_symbol(jf); }; });

  auto* codim = jet->add_subcommand("codim", "Jacobian codimension, determinacy and Z^k flags");
  codim->add_option("input", jf.input, "Germ input JSON")->required();
  codim->add_option("--order", jf.working_order, "Working order W (default 2 deg f + 4)");
  codim->add_option("--max-k", jf.max_k, "Largest k for Z^k flags (default: jet order)");
  codim->callback([&] { action = [&] { return jet_codim(jf); }; });

  auto* zk = jet->add_subcommand("zk", "Z^k membership by both paths");
  zk->add_option("input", jf.input, "Germ input JSON")->required();
  zk->add_option("--k", jf.k, "k >= 2")->required();
  zk->callback([&] { action = [&] { return jet_zk(jf); }; });

  auto* strata = jet->add_subcommand("strata", "Nonempty Boardman strata by codimension");
  strata->add_option("--n", jf.strata_n, "Source dimension")->required();
  strata->add_option("--p", jf.strata_p, "Target dimension")->required();
  strata->add_option("--k", jf.strata_k, "Maximal symbol length")->required();
  strata->add_option("--max-codim", jf.max_codim, "Codimension cap")->required();
  strata->callback([&] { action = [&] { return jet_strata(jf); }; });

  CLI::App* fol = app.add_subcommand("fol", "Functions on foliated charts");
  fol->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", ff.input, "Chart input JSON")->required();
    sub->add_option("--residual-tol", ff.residual, "Newton residual tolerance (1e-12)");
    sub->add_option("--dedup-radius", ff.dedup, "Critical point deduplication radius (1e-8)");
    sub->add_option("--eigen-threshold", ff.eigenvalue, "Relative eigenvalue zero threshold (1e-7)");
    sub->add_option("--flow-error", ff.flow_error, "Local error tolerance of the integrator (1e-9)");
    sub->add_option("--gradient-stop", ff.gradient_stop, "Gradient norm that ends a flow (1e-8)");
    sub->add_option("--max-time", ff.max_time, "Flow time budget (50)");
    sub->add_option("--max-steps", ff.max_steps, "Flow step budget (1000000)");
    sub->add_option("--epsilon", ff.epsilon, "NearSkeleton radius (1e-3)");
    sub->add_option("--confine-tol", ff.confinement, "Confinement tolerance (1e-6)");
    sub->add_option("--grid-leaf", ff.grid_leaf, "Grid points per leaf axis");
    sub->add_option("--grid-transverse", ff.grid_transverse, "Grid points per transverse axis");
  };
  auto* classify = fol->add_subcommand("classify", "Leafwise critical points and their strata");
  add_common(classify);
  classify->callback([&] { action = [&] { return fol_classify(ff); }; });

  auto* openness = fol->add_subcommand("openness", "No-leafwise-maximum certificate");
  add_common(openness);
  openness->callback([&] { action = [&] { return fol_openness(ff); }; });

  auto* flow = fol->add_subcommand("flow", "Integrate the leafwise gradient flow");
  add_common(flow);
  flow->add_option("--start", ff.start, "Start point x1,..,xn,v1,..,vq")->required();
  flow->add_option("--direction", ff.direction, "forward or backward")->capture_default_str();
  flow->callback([&] { action = [&] { return fol_flow(ff); }; });

  auto* skeleton = fol->add_subcommand("skeleton", "Sample the skeleton of a slice");
  add_common(skeleton);
  skeleton->add_option("--slice", ff.slice, "a,b")->required();
  skeleton->callback([&] { action = [&] { return fol_skeleton(ff); }; });

  auto* checks = fol->add_subcommand("checks", "Confinement, plane invariance and flow dichotomy");
  add_common(checks);
  checks->add_option("--slice", ff.slice, "a,b")->required();
  checks->add_option("--d", ff.d, "Number of squared model coordinates")->capture_default_str();
  checks->add_option("--radius", ff.radius, "Neighbourhood radius around the plane")->capture_default_str();
  checks->add_option("--samples", ff.samples, "Starts of each kind for the plane check")->capture_default_str();
  checks->callback([&] { action = [&] { return fol_checks(ff); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  Report report;
  try {
    report = action();
  } catch (const ParseError& e) {
    err << "input error at line " << e.line() << ", column " << e.column() << ": " << e.detail() << "\n";
    return kInputError;
  } catch (const InvariantViolation& e) {
    err << "internal assertion failed: " << e.what() << "\n";
    return kInternalError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }

  std::string text;
  if (format == "json") {
    report.doc["exit_code"] = report.exit_code;
    text = report.doc.dump(2) + "\n";
  } else if (format == "csv") {
    text = render_csv(report);
  } else {
    text = report.table;
  }
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
      err << "input error: cannot write '" << out_path << "'\n";
      return kInputError;
    }
    file << text;
  }
  return report.exit_code;
}

}  // namespace folsing::cli
