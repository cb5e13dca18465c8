#include "cph/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "cph/batch.hpp"
#include "cph/codegen.hpp"
#include "cph/ddreduce.hpp"
#include "cph/error.hpp"
#include "cph/mna.hpp"
#include "cph/report.hpp"
#include "cph/running_example.hpp"

namespace cph {

namespace {

struct UsageError : Error {
  using Error::Error;
};

struct CommonOptions {
  std::string netlist;
  std::string coupling;
  bool json = false;
  std::uint64_t seed = 0;
};

struct Loaded {
  Circuit circuit;
  CouplingBlocks coupling;
};

Loaded load(const CommonOptions& o) {
  std::ifstream probe(o.netlist);
  if (!probe) throw UsageError("cannot open netlist '" + o.netlist + "'");
  Loaded l{load_netlist(o.netlist), {}};
  if (!o.coupling.empty()) l.coupling = load_coupling(o.coupling);
  return l;
}

WellPosednessReport wellposedness(const Circuit& c) { return check_a1_a2(incidence_matrix(c), c.kinds()); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("invalid number '" + item + "' in --s0");
    }
    if (used != item.size()) throw UsageError("invalid number '" + item + "' in --s0");
    out.push_back(v);
  }
  return out;
}

int cmd_check(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const WellPosednessReport r = wellposedness(l.circuit);
  if (o.json)
    out << wellposedness_json(r).dump(2) << "\n";
  else
    print_wellposedness(out, r);
  return r.ok() ? kExitOk : kExitAnalysisFailure;
}

int cmd_tree(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const CphDae dae = build_dae(l.circuit, l.coupling);
  if (o.json)
    out << tree_json(dae).dump(2) << "\n";
  else
    print_tree(out, dae);
  return kExitOk;
}

int cmd_sigma(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const CphDae dae = build_dae(l.circuit, l.coupling);
  const StructuralResult sr = analyze_structure(dae, o.seed);
  if (o.json)
    out << sigma_json(sr).dump(2) << "\n";
  else
    print_sigma(out, sr);
  return sr.sa_amenable ? kExitOk : kExitAnalysisFailure;
}

int cmd_index(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const CphDae dae = build_dae(l.circuit, l.coupling);
  const StructuralResult sr = analyze_structure(dae, o.seed);
  if (o.json)
    out << Json{{"index", sr.index}, {"classified_index", sr.classified_index}, {"dof", sr.dof}}.dump(2) << "\n";
  else
    out << "index " << sr.index << " (classifier " << sr.classified_index << "), DOF " << sr.dof << "\n";
  return sr.sa_amenable ? kExitOk : kExitAnalysisFailure;
}

int cmd_analyze(const CommonOptions& o, std::ostream& out) {
  const Loaded l = load(o);
  const WellPosednessReport wp = wellposedness(l.circuit);
  if (!wp.ok()) {
    if (o.json)
      out << analysis_json(l.circuit, wp, nullptr, nullptr).dump(2) << "\n";
    else
      print_wellposedness(out, wp);
    return kExitAnalysisFailure;
  }
  const CphDae dae = build_dae(l.circuit, l.coupling);
  const StructuralResult sr = analyze_structure(dae, o.seed);
  if (o.json) {
    out << analysis_json(l.circuit, wp, &dae, &sr).dump(2) << "\n";
  } else {
    print_wellposedness(out, wp);
    print_analysis(out, dae, sr);
  }
  return sr.sa_amenable ? kExitOk : kExitAnalysisFailure;
}

struct SimulateOptions {
  double t0 = 0, t1 = 10, tol = 1e-8;
  int samples = 101;
  std::string s0, csv;
  bool oracle = false;
  int ground = 1;
};

void write_csv(std::ostream& os, const CphDae& dae, const Trajectory& tr) {
  const Circuit& c = dae.circuit();
  os << "time";
  // State columns x_<label>: the CpH state of a resistor or current source is
  // its voltage, so role-based names would repeat the port columns.
  for (int e = 0; e < c.edge_count(); ++e) os << ",x_" << c.element(e).label;
  for (int e = 0; e < c.edge_count(); ++e) os << ",v_" << c.element(e).label << ",i_" << c.element(e).label;
  os << ",H\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << tr.times[k];
    for (int e = 0; e < c.edge_count(); ++e) os << "," << tr.x[k](e);
    for (int e = 0; e < c.edge_count(); ++e) os << "," << tr.v[k](e) << "," << tr.i[k](e);
    os << "," << tr.energy[k] << "\n";
  }
}

int cmd_simulate(const CommonOptions& o, const SimulateOptions& so, std::ostream& out, std::ostream& err) {
  if (!(so.t1 > so.t0)) throw UsageError("--t1 must exceed --t0");
  if (!(so.tol > 0)) throw UsageError("--tol must be positive");
  if (so.samples < 2) throw UsageError("--samples must be at least 2");
  const Loaded l = load(o);
  const CphDae dae = build_dae(l.circuit, l.coupling);
  const StructuralResult sr = analyze_structure(dae, o.seed);
  if (!sr.sa_amenable) throw SaFailure("structural analysis failed; cannot reduce to an ODE");
  const ExplicitOde ode = reduce_to_ode(dae, select_dummies(dae, sr));
  Eigen::VectorXd s0 = Eigen::VectorXd::Ones(ode.dimension());
  if (!so.s0.empty()) {
    const std::vector<double> v = parse_list(so.s0);
    if (static_cast<int>(v.size()) != ode.dimension())
      throw UsageError("--s0 needs " + std::to_string(ode.dimension()) + " values");
    s0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const std::vector<double> times = uniform_samples(so.t0, so.t1, so.samples);
  const Trajectory tr = integrate(ode, so.t0, so.t1, s0, so.tol, times);

  err << "states s:";
  for (int e : ode.state_edges()) err << " " << dae.state_name(e);
  err << "\n";
  if (so.csv.empty()) {
    write_csv(out, dae, tr);
  } else {
    std::ofstream f(so.csv);
    if (!f) throw UsageError("cannot write '" + so.csv + "'");
    write_csv(f, dae, tr);
  }
  if (so.oracle) {
    const Trajectory ref =
        mna_oracle(l.circuit, l.coupling, so.t0, so.t1, ode.state_edges(), s0, so.tol, times, so.ground);
    double num = 0, den = so.tol;
    for (std::size_t k = 0; k < times.size(); ++k) {
      num = std::max(num, (tr.x[k] - ref.x[k]).cwiseAbs().maxCoeff());
      den = std::max(den, ref.x[k].cwiseAbs().maxCoeff());
    }
    err << "max relative state error vs MNA: " << num / den << "\n";
  }
  return kExitOk;
}

int cmd_codegen(const CommonOptions& o, const std::string& name, const std::string& path, std::ostream& out) {
  const Loaded l = load(o);
  const CphDae dae = build_dae(l.circuit, l.coupling);
  std::string circuit_name = name;
  if (circuit_name.empty()) {
    const std::string base = o.netlist.substr(o.netlist.find_last_of('/') + 1);
    circuit_name = base.substr(0, base.find('.'));
  }
  const GeneratedSource src = generate_code(dae, circuit_name);
  if (path.empty()) {
    out << src.text;
  } else {
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path + "'");
    f << src.text;
  }
  return kExitOk;
}

struct SelftestLine {
  std::string status;  // "ok", "FAIL" or "info"
  std::string what;
};

void running_example_goldens(std::vector<SelftestLine>& lines) {
  auto report = [&](const std::string& what, bool ok) { lines.push_back({ok ? "ok" : "FAIL", what}); };
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  const IncidenceMatrix a = incidence_matrix(c);
  IntMatrix a_ref(8, 5);
  a_ref << 1, -1, 0, 0, 0, 1, 0, -1, 0, 0, 1, 0, 0, -1, 0, 1, 0, 0, 0, -1, 0, 1, -1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0,
      1, -1, 0, -1, 0, 0, 1;
  report("incidence matrix", a.a == a_ref);
  const CphDae dae = build_dae(c);
  IntMatrix f_ref(4, 4);
  f_ref << 1, -1, 0, 0, 0, 1, -1, 0, 0, 0, 1, -1, -1, 0, 0, 1;
  report("tree {1,2,3,4} and loop-cutset matrix", dae.loop_cutset().twigs == std::vector<int>{0, 1, 2, 3} &&
                                                      dae.loop_cutset().f == f_ref);
  const StructuralResult sr = analyze_structure(dae, 0);
  const std::vector<std::vector<int>> sigma_ref = {
      {0, 0, kNegInf, kNegInf, kNegInf, kNegInf, kNegInf, kNegInf},
      {1, 1, kNegInf, 0, kNegInf, kNegInf, kNegInf, kNegInf},
      {kNegInf, kNegInf, 0, 0, kNegInf, kNegInf, kNegInf, kNegInf},
      {kNegInf, 0, 1, 1, kNegInf, kNegInf, kNegInf, kNegInf},
      {kNegInf, kNegInf, kNegInf, kNegInf, 0, 0, kNegInf, kNegInf},
      {kNegInf, kNegInf, kNegInf, kNegInf, 0, 0, kNegInf, kNegInf},
      {1, kNegInf, kNegInf, kNegInf, kNegInf, 0, 0, kNegInf},
      {kNegInf, kNegInf, 1, kNegInf, 0, kNegInf, kNegInf, 0}};
  bool sigma_ok = sr.full_sigma.rows() == 8;
  for (int i = 0; sigma_ok && i < 8; ++i)
    for (int j = 0; j < 8; ++j) sigma_ok = sigma_ok && sr.full_sigma.sigma(i, j) == sigma_ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  report("signature matrix", sigma_ok);
  report("offsets c = (1,0,1,0,0,0), d = (1,1,1,1,0,0)",
         sr.offsets.c == std::vector<int>{1, 0, 1, 0, 0, 0} && sr.offsets.d == std::vector<int>{1, 1, 1, 1, 0, 0});
  report("DOF 2, index 2", sr.dof == 2 && sr.index == 2 && sr.classified_index == 2);
  report("SA-amenable", sr.sa_amenable);
  const std::string code = generate_code(dae, "P8by5").text;
  report("generated code", code.find("  v[2] = x[2]/C3;         i[2] = Diff(x[2],1);\n") != std::string::npos &&
                               code.find("  f[4] =  v[4]+v[0]-v[1];\n") != std::string::npos);
}

int cmd_selftest(const CommonOptions& o, int random, std::ostream& out) {
  std::vector<SelftestLine> lines;
  running_example_goldens(lines);
  if (random > 0) {
    const std::vector<PropertyRecord> recs = run_batch_parallel(GenConfig{}, o.seed, random);
    int errors = 0, amenable = 0, closed = 0, agree = 0;
    for (const PropertyRecord& r : recs) {
      if (!r.analysed) {
        ++errors;
        lines.push_back({"FAIL", "seed " + std::to_string(r.seed) + ": " + r.error});
      }
      amenable += r.sa_amenable;
      closed += r.offsets_closed_form;
      agree += r.index == r.classified_index;
    }
    const std::string of = "/" + std::to_string(random);
    lines.push_back({amenable == random ? "ok" : "FAIL", "SA-amenable: " + std::to_string(amenable) + of});
    lines.push_back({"info", "offsets equal the block pattern: " + std::to_string(closed) + of});
    lines.push_back({"info", "index equals the classifier: " + std::to_string(agree) + of});
  }
  const auto failures = std::count_if(lines.begin(), lines.end(), [](const SelftestLine& l) { return l.status == "FAIL"; });
  if (o.json) {
    Json checks = Json::array();
    for (const auto& l : lines) checks.push_back({{"status", l.status}, {"check", l.what}});
    out << Json{{"checks", checks}, {"failures", failures}}.dump(2) << "\n";
  } else {
    for (const auto& l : lines) out << std::left << std::setw(6) << l.status << l.what << "\n";
  }
  return failures == 0 ? kExitOk : kExitAnalysisFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compact port-Hamiltonian circuit analysis", "cph"};
  app.require_subcommand(1);
  CommonOptions common;
  SimulateOptions sim;
  std::string name, output;
  int random = 0;

  auto add_netlist = [&](CLI::App* sub) {
    sub->add_option("netlist", common.netlist, "netlist file")->required();
    sub->add_option("--coupling", common.coupling, "coupled parameter blocks (JSON)");
    sub->add_flag("--json", common.json, "machine-readable output");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", common.seed, "random seed"); };

  CLI::App* check = app.add_subcommand("check", "A1/A2 well-posedness");
  add_netlist(check);
  CLI::App* tree = app.add_subcommand("tree", "optimal tree, F and edge partition");
  add_netlist(tree);
  CLI::App* sigma = app.add_subcommand("sigma", "signature matrix, offsets and Jacobian blocks");
  add_netlist(sigma);
  add_seed(sigma);
  CLI::App* index = app.add_subcommand("index", "structural index and DOF");
  add_netlist(index);
  add_seed(index);
  CLI::App* analyze = app.add_subcommand("analyze", "full analysis report");
  add_netlist(analyze);
  add_seed(analyze);
  CLI::App* simulate = app.add_subcommand("simulate", "reduce to an ODE and integrate; CSV output");
  add_netlist(simulate);
  add_seed(simulate);
  simulate->add_option("--t0", sim.t0, "start time");
  simulate->add_option("--t1", sim.t1, "end time");
  simulate->add_option("--s0", sim.s0, "initial values of the ODE states, comma separated (default: all 1)");
  simulate->add_option("--tol", sim.tol, "relative and absolute tolerance");
  simulate->add_option("--samples", sim.samples, "number of output times");
  simulate->add_option("--csv", sim.csv, "write CSV here instead of stdout");
  simulate->add_flag("--oracle", sim.oracle, "compare against the nodal-analysis reference");
  simulate->add_option("--ground", sim.ground, "ground node of the nodal-analysis reference");
  CLI::App* codegen = app.add_subcommand("codegen", "emit the residual function for a DAE solver");
  add_netlist(codegen);
  codegen->add_option("--name", name, "circuit name in the generated comment");
  codegen->add_option("-o", output, "output file (default stdout)");
  CLI::App* selftest = app.add_subcommand("selftest", "built-in goldens and random property checks");
  selftest->add_option("--random", random, "number of random circuits")->check(CLI::NonNegativeNumber);
  selftest->add_flag("--json", common.json, "summary as JSON");
  add_seed(selftest);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(common, out);
    if (*tree) return cmd_tree(common, out);
    if (*sigma) return cmd_sigma(common, out);
    if (*index) return cmd_index(common, out);
    if (*analyze) return cmd_analyze(common, out);
    if (*simulate) return cmd_simulate(common, sim, out, err);
    if (*codegen) return cmd_codegen(common, name, output, out);
    if (*selftest) return cmd_selftest(common, random, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << common.netlist << ": " << e.what() << "\n";
    return kExitAnalysisFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAnalysisFailure;
  }
  return kExitUsage;
}

}  // namespace cph
