#include "sunforest/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sunforest/oracle.hpp"
#include "sunforest/parser.hpp"
#include "sunforest/reducer.hpp"
#include "sunforest/trace_expand.hpp"

namespace sunforest {

namespace {

using nlohmann::json;

std::string slurp_stdin() {
  std::ostringstream os;
  os << std::cin.rdbuf();
  return os.str();
}

Expression parse_arg(const std::string& arg) {
  return parse_expression(arg == "-" ? slurp_stdin() : arg);
}

json coefficient_json(const Coefficient& c) {
  json powers = json::object();
  for (auto& [p, g] : c.terms()) {
    powers[std::to_string(p)] = {
        {rational_str(numerator(g.re)), rational_str(denominator(g.re))},
        {rational_str(numerator(g.im)), rational_str(denominator(g.im))}};
  }
  return powers;
}

json expression_json(const Expression& e) {
  json terms = json::array();
  for (auto& [enc, t] : e.terms())
    terms.push_back({{"encoding", enc},
                     {"coefficient", coefficient_json(t.coeff)},
                     {"diagram", format_diagram(t.rep)}});
  return {{"terms", terms}, {"printed", format_expression(e)}};
}

std::vector<int> parse_n_list(const std::string& s) {
  std::vector<int> ns;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) ns.push_back(std::stoi(item));
  }
  if (ns.empty()) throw CLI::ValidationError("--N", "empty N list");
  for (int n : ns)
    if (n < 2) throw CLI::ValidationError("--N", "N must be >= 2");
  return ns;
}

int cmd_reduce(const std::string& expr_text, bool show_trace, const std::string& check_n,
               long budget, bool as_json, std::ostream& out) {
  Expression input = parse_arg(expr_text);
  ReducerOptions opt;
  opt.step_budget = budget;
  ReduceResult res = reduce_to_forests(input, opt);
  json j;
  j["result"] = expression_json(res.forests);
  j["rule_applications"] = res.rule_applications;
  if (!as_json) out << format_expression(res.forests) << "\n";
  if (show_trace && !as_json) {
    int k = 0;
    for (auto& st : res.trace.steps)
      out << "step " << k++ << " [" << phase_name(st.phase) << "/" << rule_name(st.id) << "] "
          << st.site << ": " << format_diagram(st.input_rep) << " -> "
          << format_expression(st.output) << "\n";
  }
  int code = 0;
  if (!check_n.empty()) {
    std::vector<int> ns = parse_n_list(check_n);
    double max_diff = 0.0;
    long violations = 0;
    for (auto& st : res.trace.steps) {
      VerifyReport rep =
          verify_equal(Expression::term(st.input_rep), st.output, ns, 50, 1e-9, 4242);
      max_diff = std::max(max_diff, rep.max_abs_diff);
      if (!rep.pass) ++violations;
    }
    VerifyReport end2end = verify_equal(input, res.forests, ns, 100, 1e-8, 4243);
    j["check"] = {{"steps", res.trace.steps.size()},
                  {"max_step_diff", max_diff},
                  {"violations", violations},
                  {"end_to_end_pass", end2end.pass},
                  {"end_to_end_max_diff", end2end.max_abs_diff}};
    if (!as_json)
      out << "per-step check: " << res.trace.steps.size() << " steps, max |diff| = " << max_diff
          << ", violations = " << violations << "; end-to-end "
          << (end2end.pass ? "PASS" : "FAIL") << " (" << end2end.detail << ")\n";
    if (violations > 0 || !end2end.pass) code = 1;
  }
  if (as_json) out << j.dump(2) << "\n";
  return code;
}

int cmd_verify(const std::string& a_text, const std::string& b_text, const std::string& n_list,
               long samples, double tol, bool as_json, std::ostream& out) {
  Expression a = parse_arg(a_text);
  Expression b = parse_arg(b_text);
  VerifyReport rep = verify_equal(a, b, parse_n_list(n_list), samples, tol);
  if (as_json) {
    json j = {{"pass", rep.pass},
              {"max_abs_diff", rep.max_abs_diff},
              {"points", rep.points},
              {"exhaustive", rep.exhaustive}};
    out << j.dump(2) << "\n";
  } else {
    out << (rep.pass ? "PASS" : "FAIL") << ": " << rep.detail << "\n";
  }
  return rep.pass ? 0 : 1;
}

int cmd_trace(const std::string& word, const std::string& kind, long budget, bool as_json,
              std::ostream& out) {
  TraceWord w;
  std::stringstream ss(word);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) w.indices.push_back(item);
  Expression result;
  if (kind == "lambda") {
    w.kind = TraceWord::Kind::Fundamental;
    result = expand_trace(w);
  } else {
    w.kind = kind == "D" ? TraceWord::Kind::AdjointD : TraceWord::Kind::AdjointF;
    Diagram loop = adjoint_trace_diagram(w);
    ReducerOptions opt;
    opt.step_budget = budget;
    opt.record_trace = false;
    result = reduce_to_forests(Expression::term(loop), opt).forests;
  }
  if (as_json)
    out << expression_json(result).dump(2) << "\n";
  else
    out << format_expression(result) << "\n";
  return 0;
}

int cmd_fit(const std::string& expr_text, const std::string& n_list, int holdout, bool as_json,
            std::ostream& out) {
  Expression e = parse_arg(expr_text);
  if (e.size() != 1)
    throw std::invalid_argument("fit expects a single-term expression");
  const auto& [enc, term] = *e.terms().begin();
  FitOptions opt;
  opt.ns = parse_n_list(n_list);
  opt.holdout = holdout;
  Expression fitted = fit_forest_coefficients(term.rep, opt).scaled(term.coeff);
  if (as_json)
    out << expression_json(fitted).dump(2) << "\n";
  else
    out << format_expression(fitted) << "\n";
  return 0;
}

int cmd_canon(const std::string& expr_text, bool as_json, std::ostream& out) {
  Expression e = parse_arg(expr_text);
  if (as_json)
    out << expression_json(e).dump(2) << "\n";
  else
    out << format_expression(e) << "\n";
  return 0;
}

int cmd_constants(int n, const std::string& out_path, std::ostream& out) {
  const StructureTensors& t = structure_tensors(n);
  std::ostringstream os;
  os << "tensor,a,b,c,value\n";
  os << std::setprecision(15);
  for (int a = 0; a < t.dim; ++a)
    for (int b = 0; b < t.dim; ++b)
      for (int c = 0; c < t.dim; ++c) {
        double dv = t.d_at(a, b, c), fv = t.f_at(a, b, c);
        if (dv != 0.0) os << "d," << a + 1 << "," << b + 1 << "," << c + 1 << "," << dv << "\n";
        if (fv != 0.0) os << "f," << a + 1 << "," << b + 1 << "," << c + 1 << "," << fv << "\n";
      }
  if (out_path.empty()) {
    out << os.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open " + out_path);
    f << os.str();
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"su(N) invariant-tensor reduction to forests"};
  app.require_subcommand(1);

  std::string expr_a, expr_b, n_list = "3,4", check_n, word, kind = "lambda", out_path;
  long budget = 1000000, samples = 200;
  double tol = 1e-9;
  bool as_json = false, show_trace = false;
  int holdout = 7, const_n = 3;

  app.add_flag("--json", as_json, "machine-readable JSON output");

  auto* reduce = app.add_subcommand("reduce", "normalize an expression to forests");
  reduce->add_option("expr", expr_a, "expression (or - for stdin)")->required();
  reduce->add_flag("--trace", show_trace, "print every rewrite step");
  reduce->add_option("--check-N", check_n, "verify each step numerically at these N");
  reduce->add_option("--budget", budget, "rule application budget");

  auto* verify = app.add_subcommand("verify", "compare two expressions numerically");
  verify->add_option("exprA", expr_a)->required();
  verify->add_option("exprB", expr_b)->required();
  verify->add_option("--N", n_list, "comma-separated N values");
  verify->add_option("--samples", samples, "random assignments per N");
  verify->add_option("--tol", tol, "pass threshold on |difference|");

  auto* trace = app.add_subcommand("trace", "expand or reduce a generator trace");
  trace->add_option("--word", word, "comma-separated index names")->required();
  trace->add_option("--kind", kind, "lambda | D | F")
      ->check(CLI::IsMember({"lambda", "D", "F"}));
  trace->add_option("--budget", budget, "rule application budget");

  auto* fit = app.add_subcommand("fit", "oracle forest fit of a diagram");
  fit->add_option("expr", expr_a)->required();
  fit->add_option("--N", n_list, "comma-separated N values for the fit");
  fit->add_option("--holdout", holdout, "validation N");

  auto* canon = app.add_subcommand("canon", "canonical form with signs resolved");
  canon->add_option("expr", expr_a)->required();

  auto* constants = app.add_subcommand("constants", "export d/f tensors for one N");
  constants->add_option("--N", const_n, "group rank parameter")->required();
  constants->add_option("--out", out_path, "output file (default stdout)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (reduce->parsed()) return cmd_reduce(expr_a, show_trace, check_n, budget, as_json, out);
    if (verify->parsed()) return cmd_verify(expr_a, expr_b, n_list, samples, tol, as_json, out);
    if (trace->parsed()) return cmd_trace(word, kind, budget, as_json, out);
    if (fit->parsed()) return cmd_fit(expr_a, n_list, holdout, as_json, out);
    if (canon->parsed()) return cmd_canon(expr_a, as_json, out);
    if (constants->parsed()) return cmd_constants(const_n, out_path, out);
  } catch (const StepBudgetExceeded& e) {
    err << "step budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace sunforest
