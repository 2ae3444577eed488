#pragma once
//------------------------------------------------------------------------------
// Command-line front end: project, cls, image, bench.
//
// Exit codes: 0 success, 1 usage error, 2 invalid or infeasible input,
// 3 escape safeguard exceeded.
//------------------------------------------------------------------------------

#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyproj/bench.hpp"
#include "polyproj/cls.hpp"
#include "polyproj/escape.hpp"
#include "polyproj/image.hpp"
#include "polyproj/io.hpp"

namespace polyproj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSafeguard = 3;

namespace detail {

inline Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
  return out;
}

inline EnumeratorConfig enumerator_config(const std::string& kind, std::size_t max_subsets) {
  EnumeratorConfig cfg;
  cfg.kind = kind == "rank-filtered" ? EnumeratorKind::rank_filtered : EnumeratorKind::simple;
  if (max_subsets > 0) cfg.max_subsets = max_subsets;
  return cfg;
}

inline Json solution_json(const Solution& s) {
  Json j;
  j["point"] = to_json(s.point);
  j["distance"] = s.distance;
  j["escapes"] = s.escapes;
  j["ascents"] = s.ascents;
  j["enumeration_truncated"] = s.enumeration_truncated;
  Json steps = Json::array();
  for (const auto& st : s.trace.steps) {
    Json js;
    js["point"] = to_json(st.point);
    js["distance"] = st.distance;
    js["kind"] = std::string(to_string(st.kind));
    js["active_rows"] = to_json(st.active_rows);
    if (st.enumerated_subset) js["subset"] = to_json(*st.enumerated_subset);
    steps.push_back(std::move(js));
  }
  j["trace"] = std::move(steps);
  return j;
}

/// Iterates as rows: step number, coordinates, distance, step kind.
inline RenderedTable trace_table(const Solution& s, const std::string& var, NumberStyle style) {
  RenderedTable t;
  t.headers.push_back("Step");
  const Index n = s.point.size();
  for (Index k = 0; k < n; ++k) t.headers.push_back(var + std::to_string(k));
  t.headers.push_back("Distance");
  t.headers.push_back("Kind");
  std::size_t i = 0;
  for (const auto& st : s.trace.steps) {
    std::vector<std::string> r{std::to_string(i++)};
    for (Index k = 0; k < n; ++k) r.push_back(format_number(st.point(k), style));
    r.push_back(format_number(st.distance, style));
    r.push_back(std::string(to_string(st.kind)));
    t.add_row(std::move(r));
  }
  return t;
}

inline std::string vector_text(const Vector& v, NumberStyle style = NumberStyle::fixed) {
  std::string s = "(";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v(i), style);
  return s + ")";
}

inline void add_enumerator_options(CLI::App* app, std::string& kind, std::size_t& max_subsets) {
  app->add_option("--enumerator", kind, "Superface enumerator")->check(CLI::IsMember({"simple", "rank-filtered"}));
  app->add_option("--max-subsets", max_subsets, "Cap on subsets per enumeration (0: none)");
}

}  // namespace detail

//------------------------------------------------------------------------------

struct ProjectArgs {
  std::string problem;
  std::vector<double> target, start, interior;
  bool json = false;
  bool sci = false;
  std::string enumerator = "simple";
  std::size_t max_subsets = 0;
};

inline int cmd_project(const ProjectArgs& args, std::ostream& out) {
  ProblemFile pf = parse_problem(parse_json_text(read_text(args.problem)));
  const PolyhedronH& poly = pf.poly;
  if (!args.target.empty()) pf.p = detail::to_vector(args.target);
  if (!args.start.empty()) pf.start = detail::to_vector(args.start);
  if (!args.interior.empty()) pf.interior = detail::to_vector(args.interior);
  if (!pf.p) throw Error(ErrorCode::InvalidInput, "no target: give \"p\" in the problem or --target");
  const Vector& target = *pf.p;
  check_dim(poly, target);
  const EnumeratorConfig cfg = detail::enumerator_config(args.enumerator, args.max_subsets);
  const NumberStyle style = args.sci ? NumberStyle::scientific : NumberStyle::fixed;

  Solution sol;
  Vector start;
  if (contains(poly, target)) {
    start = target;
    sol.point = target;
    sol.trace.steps.push_back({target, 0.0, StepKind::start, tight_rows(poly, target), std::nullopt});
    sol.trace.steps.push_back({target, 0.0, StepKind::done, tight_rows(poly, target), std::nullopt});
  } else if (pf.start) {
    start = *pf.start;
    sol = solve(poly, target, start, cfg);
  } else if (pf.interior) {
    check_dim(poly, *pf.interior);
    if (!contains(poly, *pf.interior)) throw Error(ErrorCode::PointOutside, "interior point is infeasible");
    start = poly.has_equalities() ? *pf.interior : visible_point(poly, *pf.interior, target);
    sol = solve(poly, target, start, cfg);
  } else {
    throw Error(ErrorCode::InvalidInput, "no start: give --start (target-visible) or --interior (feasible)");
  }

  if (args.json) {
    Json j = problem_to_json(poly);
    j["p"] = to_json(target);
    j["start"] = to_json(start);
    j["solution"] = detail::solution_json(sol);
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << render(detail::trace_table(sol, "x", style));
  out << "solution " << detail::vector_text(sol.point, style) << "  distance " << format_number(sol.distance, style)
      << "  escapes " << sol.escapes << "  ascents " << sol.ascents << "\n";
  if (sol.enumeration_truncated) out << "warning: enumeration truncated by --max-subsets; result not certified\n";
  return kExitOk;
}

//------------------------------------------------------------------------------

struct ClsArgs {
  std::string data;
  std::size_t rows = 0;
  std::optional<double> bound;
  std::string constraints;
  std::vector<Index> pivot_order;
  std::string format = "table";
  bool sci = false;
  std::string enumerator = "simple";
  std::size_t max_subsets = 0;
};

inline int cmd_cls(const ClsArgs& args, std::ostream& out) {
  Matrix data = read_csv_matrix(args.data);
  if (data.cols() < 2) throw Error(ErrorCode::ParseError, args.data + ": need at least one column of A plus b");
  if (args.rows > 0) {
    if (static_cast<Index>(args.rows) > data.rows()) throw Error(ErrorCode::InvalidInput, "--rows exceeds the data rows");
    data.conservativeResize(static_cast<Index>(args.rows), Eigen::NoChange);
  }
  const Matrix a = data.leftCols(data.cols() - 1);
  const Vector b = data.col(data.cols() - 1);
  const Index n = a.cols();

  if (args.bound.has_value() == !args.constraints.empty()) {
    throw Error(ErrorCode::InvalidInput, "give exactly one of --bound and --constraints");
  }
  std::optional<PolyhedronH> poly;
  if (args.bound) {
    poly.emplace(Matrix::Identity(n, n), Vector::Constant(n, *args.bound));
  } else {
    poly.emplace(parse_problem(parse_json_text(read_text(args.constraints))).poly);
  }

  ClsOptions opt;
  opt.enumerator = detail::enumerator_config(args.enumerator, args.max_subsets);
  if (!args.pivot_order.empty()) opt.pivot = PivotPolicy::explicit_order(IndexList(args.pivot_order.begin(), args.pivot_order.end()));
  const ClsReport rep = solve_cls(a, b, *poly, opt);
  const NumberStyle style = args.sci ? NumberStyle::scientific : NumberStyle::fixed;
  const ReducedProblem& rp = rep.reduced;

  if (args.format == "json") {
    Json j;
    j["rank"] = rep.rank;
    j["singular"] = rep.singular();
    j["solution"] = to_json(rep.solution);
    j["residual"] = rep.residual;
    j["unconstrained"] = to_json(rep.unconstrained);
    j["unconstrained_residual"] = rep.unconstrained_residual;
    j["reduced_target"] = to_json(rp.target);
    j["y_star"] = to_json(rep.y_star);
    if (rep.trace) j["trace"] = detail::solution_json(*rep.trace);
    if (rp.singular) {
      j["perm"] = to_json(rp.factor->perm);
      j["gamma"] = to_json(rp.factor->gamma);
      j["U"] = to_json(rp.factor->u);
      j["L"] = to_json(rp.factor->l);
      j["image_unconstrained"] = rp.image.empty_marker;
      j["image_B"] = to_json(rp.image.b);
      j["image_c"] = to_json(rp.image.c);
      j["z"] = to_json(rep.recovery.z);
      j["x0"] = to_json(rep.recovery.map.base);
      j["N"] = to_json(rep.recovery.map.dirs);
      j["free"] = to_json(rep.recovery.map.free_idx);
      j["param_B"] = to_json(rep.recovery.param_system.b);
      j["param_c"] = to_json(rep.recovery.param_system.c);
      j["t"] = to_json(rep.fit->t);
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }

  out << (rp.singular ? "rank-deficient" : "full column rank") << " A: " << a.rows() << " x " << n << ", rank "
      << rep.rank << "\n\n";
  if (rp.singular) {
    const RankLU& f = *rp.factor;
    out << "row order " << to_json(f.perm).dump() << ", pivot columns " << to_json(f.gamma).dump() << "\n\nU\n"
        << render_matrix(f.u, style) << "\nL\n" << render_matrix(f.l, style) << "\nconstraints on z = U x\n"
        << render_system(rp.image, "z", style) << "\n";
  }
  out << "reduced target p " << detail::vector_text(rp.target, style) << "\n\n";
  if (rep.trace) {
    out << "iterates\n" << render(detail::trace_table(*rep.trace, "y", style)) << "\n";
  } else {
    out << "reduced problem solved directly (target feasible or unconstrained)\n\n";
  }
  if (rp.singular) {
    const AffineMap& m = rep.recovery.map;
    out << "z " << detail::vector_text(rep.recovery.z, style) << "\n";
    out << "x = x0 + N t, x0 " << detail::vector_text(m.base, style) << ", free columns " << to_json(m.free_idx).dump()
        << "\nN\n" << render_matrix(m.dirs, style) << "\nconstraints on t\n"
        << render_system(rep.recovery.param_system, "t", style) << "\nt " << detail::vector_text(rep.fit->t, style)
        << "\n\n";
  }
  RenderedTable t;
  t.headers.push_back("Constraint");
  for (Index k = 0; k < n; ++k) t.headers.push_back("x" + std::to_string(k));
  t.headers.push_back("Residual");
  auto row = [&](const std::string& name, const Vector& x, double r) {
    std::vector<std::string> cells{name};
    for (Index k = 0; k < n; ++k) cells.push_back(format_number(x(k), style));
    cells.push_back(format_number(r, style));
    t.add_row(std::move(cells));
  };
  row("P", rep.solution, rep.residual);
  row("None", rep.unconstrained, rep.unconstrained_residual);
  out << render(t);
  return kExitOk;
}

//------------------------------------------------------------------------------

struct ImageArgs {
  std::string constraints;
  std::string map;
  std::vector<Index> pivot_order;
  std::string format = "both";
  bool sci = false;
};

inline int cmd_image(const ImageArgs& args, std::ostream& out) {
  const ProblemFile pf = parse_problem(parse_json_text(read_text(args.constraints)));
  const auto [b, c] = polyproj::detail::inequality_form(pf.poly);
  const Matrix lambda = read_csv_matrix(args.map);
  if (lambda.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "map has " + std::to_string(lambda.cols()) + " columns, constraints live in R^" +
                                                  std::to_string(b.cols()));
  }
  PivotPolicy pivot;
  if (!args.pivot_order.empty()) pivot = PivotPolicy::explicit_order(IndexList(args.pivot_order.begin(), args.pivot_order.end()));
  const IneqSystem img = image_constraints(b, c, lambda, pivot);

  if (args.format != "text") {
    Json j;
    j["vars"] = img.vars();
    j["unconstrained"] = img.empty_marker;
    j["B"] = to_json(img.b);
    j["c"] = to_json(img.c);
    out << j.dump(2) << "\n";
  }
  if (args.format != "json") {
    out << render_system(img, "z", args.sci ? NumberStyle::scientific : NumberStyle::fixed);
  }
  return kExitOk;
}

//------------------------------------------------------------------------------

struct BenchArgs {
  std::string shape = "cube";
  Index dim = 10;
  std::size_t trials = 1000;
  std::string start = "barycenter";
  std::uint64_t seed = 1;
  double distance = 5.0;
  unsigned threads = 1;
  std::string format = "table";
  std::string enumerator = "simple";
  std::size_t max_subsets = 0;
};

inline int cmd_bench(const BenchArgs& args, std::ostream& out) {
  TrialConfig cfg;
  cfg.shape = args.shape == "simplex" ? Shape::simplex : Shape::cube;
  cfg.dim = args.dim;
  cfg.trials = args.trials;
  cfg.start = args.start == "vertex" ? StartStrategy::vertex : StartStrategy::barycenter;
  cfg.seed = args.seed;
  cfg.target_distance = args.distance;
  cfg.threads = args.threads;
  cfg.enumerator = detail::enumerator_config(args.enumerator, args.max_subsets);
  const TrialStats s = run_trials(cfg);

  if (args.format == "json") {
    Json j;
    j["shape"] = std::string(to_string(cfg.shape));
    j["dim"] = cfg.dim;
    j["start"] = std::string(to_string(cfg.start));
    j["trials"] = s.trials;
    j["seed"] = cfg.seed;
    j["distance"] = cfg.target_distance;
    j["mean_steps"] = s.mean_steps;
    j["max_steps"] = s.max_steps;
    j["mean_ascents"] = s.mean_ascents;
    j["max_ascents"] = s.max_ascents;
    j["mean_msec"] = s.mean_msec;
    j["max_msec"] = s.max_msec;
    j["failures"] = s.failures;
    j["descent_violations"] = s.descent_violations;
    if (s.max_clamp_error) j["max_clamp_error"] = *s.max_clamp_error;
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  RenderedTable t;
  t.headers = {"Shape", "Dim", "Start", "Trials", "Steps", "Max Steps", "Ascents", "Max Ascents", "MSec", "Max MSec", "Failures"};
  t.add_row({std::string(to_string(cfg.shape)), std::to_string(cfg.dim), std::string(to_string(cfg.start)),
             std::to_string(s.trials), format_number(s.mean_steps, NumberStyle::fixed, 2), std::to_string(s.max_steps),
             format_number(s.mean_ascents, NumberStyle::fixed, 2), std::to_string(s.max_ascents),
             format_number(s.mean_msec, NumberStyle::fixed, 3), format_number(s.max_msec, NumberStyle::fixed, 3),
             std::to_string(s.failures)});
  out << (args.format == "csv" ? render_csv(t) : render(t));
  return kExitOk;
}

//------------------------------------------------------------------------------

/// Runs the tool on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nearest points of polyhedra, constrained least squares and linear images"};
  app.require_subcommand(1);

  ProjectArgs pa;
  auto* project = app.add_subcommand("project", "Nearest point of a polyhedron to a target");
  project->add_option("problem", pa.problem, "Problem JSON file, or - for stdin")->required();
  project->add_option("--target", pa.target, "Target point (overrides \"p\")")->delimiter(',');
  project->add_option("--start", pa.start, "Target-visible feasible start")->delimiter(',');
  project->add_option("--interior", pa.interior, "Feasible point; the start is the visible point toward the target")->delimiter(',');
  project->add_flag("--json", pa.json, "Machine-readable output");
  project->add_flag("--sci", pa.sci, "Scientific number display");
  detail::add_enumerator_options(project, pa.enumerator, pa.max_subsets);

  ClsArgs ca;
  auto* cls = app.add_subcommand("cls", "Least squares over a polyhedron");
  cls->add_option("--data", ca.data, "CSV with A in the leading columns and b last")->required();
  cls->add_option("--rows", ca.rows, "Use only the first N rows");
  cls->add_option("--bound", ca.bound, "Box constraints x_i <= u");
  cls->add_option("--constraints", ca.constraints, "Constraint JSON (A, b, optional eqA, eqb)");
  cls->add_option("--pivot-order", ca.pivot_order, "Explicit LU row order")->delimiter(',');
  cls->add_option("--format", ca.format)->check(CLI::IsMember({"table", "json"}));
  cls->add_flag("--sci", ca.sci, "Scientific number display");
  detail::add_enumerator_options(cls, ca.enumerator, ca.max_subsets);

  ImageArgs ia;
  auto* image = app.add_subcommand("image", "Constraints describing the image of a polyhedron under a linear map");
  image->add_option("--constraints", ia.constraints, "Constraint JSON of the source polyhedron")->required();
  image->add_option("--map", ia.map, "CSV of the map matrix")->required();
  image->add_option("--pivot-order", ia.pivot_order, "Explicit LU row order")->delimiter(',');
  image->add_option("--format", ia.format)->check(CLI::IsMember({"json", "text", "both"}));
  image->add_flag("--sci", ia.sci, "Scientific number display");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Random trials on cubes and simplices");
  bench->add_option("--shape", ba.shape)->check(CLI::IsMember({"cube", "simplex"}));
  bench->add_option("--dim", ba.dim)->check(CLI::Range(2, 100000));
  bench->add_option("--trials", ba.trials)->check(CLI::PositiveNumber);
  bench->add_option("--start", ba.start)->check(CLI::IsMember({"barycenter", "vertex"}));
  bench->add_option("--seed", ba.seed);
  bench->add_option("--distance", ba.distance)->check(CLI::PositiveNumber);
  bench->add_option("--threads", ba.threads)->check(CLI::PositiveNumber);
  bench->add_option("--format", ba.format)->check(CLI::IsMember({"table", "json", "csv"}));
  detail::add_enumerator_options(bench, ba.enumerator, ba.max_subsets);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*project) return cmd_project(pa, out);
    if (*cls) return cmd_cls(ca, out);
    if (*image) return cmd_image(ia, out);
    if (*bench) return cmd_bench(ba, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::SafeguardExceeded ? kExitSafeguard : kExitInput;
  } catch (const Json::exception& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace polyproj::cli
