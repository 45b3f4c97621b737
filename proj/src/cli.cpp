#include "oiss/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>

#include "oiss/admissibility.hpp"
#include "oiss/counterexample.hpp"
#include "oiss/csv.hpp"
#include "oiss/error.hpp"
#include "oiss/grid.hpp"
#include "oiss/orlicz.hpp"
#include "oiss/systems.hpp"
#include "oiss/young.hpp"

namespace oiss::cli {

namespace {

// ---- config files ----------------------------------------------------------

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

// Flat key=value file. `command` names the subcommand path ("young check");
// every other key becomes --key value unless given on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw ParseError("cannot read config file " + *path);
  std::vector<std::string> command;
  std::vector<std::string> extra;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(fmt::format("{}:{}: expected key=value", *path, number));
    const std::string key(csv::trim(text.substr(0, eq)));
    const std::string value(csv::trim(text.substr(eq + 1)));
    if (key == "command") {
      for (const auto& part : csv::split(value, ' ')) {
        if (!csv::trim(part).empty()) command.emplace_back(csv::trim(part));
      }
      continue;
    }
    const std::string flag = "--" + key;
    if (has_flag(args, flag)) continue;
    extra.push_back(flag);
    extra.push_back(value);
  }
  if (!command.empty() && (args.empty() || args.front().starts_with("-"))) {
    args.insert(args.begin(), command.begin(), command.end());
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

// ---- argument parsing helpers ------------------------------------------------

std::optional<double> as_number(std::string_view s) {
  try {
    return csv::parse_double(s);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// A number means the constant function; anything else is a piecewise CSV path.
PiecewiseFn load_function(const std::string& spec) {
  if (const auto v = as_number(spec)) return PiecewiseFn::constant(*v);
  return read_piecewise(spec);
}

Sequence load_sequence(const std::string& spec) {
  Sequence out;
  bool numbers = true;
  for (const auto& part : csv::split(spec, ',')) {
    const auto v = as_number(part);
    if (!v) {
      numbers = false;
      break;
    }
    out.push_back(*v);
  }
  if (numbers) return out;
  out.clear();
  for (const auto& row : csv::read_table(spec).rows) out.push_back(row.back());
  return out;
}

StateFn load_state(const SystemModel& model, const std::string& spec) {
  if (spec.empty()) return zero_state(model);
  if (std::holds_alternative<TranslationL1>(model)) return read_piecewise(spec);
  return load_sequence(spec);
}

// `id`, `linear:C`, `power:P` or `power:P:C`.
ComparisonFn parse_gain(const std::string& spec) {
  if (spec == "id") return ComparisonFn::identity();
  const auto parts = csv::split(spec, ':');
  if (parts[0] == "linear" && parts.size() == 2) return ComparisonFn::linear(csv::parse_double(parts[1]));
  if (parts[0] == "power" && (parts.size() == 2 || parts.size() == 3)) {
    return ComparisonFn::power(csv::parse_double(parts[1]), parts.size() == 3 ? csv::parse_double(parts[2]) : 1.0);
  }
  throw ParseError("unknown gain '" + spec + "' (expected id, linear:C, power:P[:C])");
}

// `orbit` (||T(t) x0||) or `exp:M:OMEGA` (M ||x0|| e^(-omega t)).
ComparisonFn parse_beta(const std::string& spec, const SystemModel& model, const StateFn& x0) {
  if (spec == "orbit") return ComparisonFn::semigroup_orbit(model, x0);
  const auto parts = csv::split(spec, ':');
  if (parts[0] == "exp" && parts.size() == 3) {
    return ComparisonFn::exponential_decay(csv::parse_double(parts[1]), csv::parse_double(parts[2]), state_norm(x0));
  }
  throw ParseError("unknown beta '" + spec + "' (expected orbit, exp:M:OMEGA)");
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << text;
}

std::string no_commas(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

double certificate_slack() {
  const char* env = std::getenv("OISS_TOL");
  if (env == nullptr || *env == '\0') return kDefaultSlack;
  const double v = csv::parse_double(env);
  if (!(v >= 0.0)) throw ParseError("OISS_TOL must be a nonnegative number");
  return v;
}

std::vector<NamedInput> random_bumps(const SystemModel& model, double t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> width(0.1, 1.0);
  const bool translation = std::holds_alternative<TranslationL1>(model);
  std::uniform_real_distribution<double> where(0.0, translation ? 2.0 * t : t);
  std::vector<NamedInput> out;
  for (int i = 0; i < 8; ++i) {
    const double m = where(rng);
    const double w = width(rng);
    const auto bump = PiecewiseFn::indicator(m, m + w);
    const std::string name = fmt::format("bump@{}+{}", csv::format_number(m), csv::format_number(w));
    if (translation) {
      out.push_back({name, StateSegments{{0.0, t}, {bump}}});
    } else {
      out.push_back({name, ScalarSignal{bump}});
    }
  }
  return out;
}

// ---- subcommands -----------------------------------------------------------

struct YoungOptions {
  std::string phi;
  std::string grid;
  double threshold = 10.0;
  double cap = 1e6;
  std::string at;
};

int young_check(const YoungOptions& o, std::ostream& out) {
  const auto phi = YoungFunction::parse(o.phi);
  const auto grid = parse_explicit_grid(o.grid.empty() ? "log:1e-3:1e3:61" : o.grid);
  const auto report = check_young(phi, grid, o.threshold);
  std::string text = "property,pass,first_failure,detail\n";
  for (const auto& c : report.checks) {
    text += fmt::format("{},{},{},{}\n", c.property, c.pass ? "pass" : "fail",
                        c.first_failure ? csv::format_number(*c.first_failure) : "", no_commas(c.detail));
  }
  for (const auto& note : report.notes) text += "# " + note + "\n";
  out << text;
  return report.all_pass() ? kExitOk : kExitVerdictFailed;
}

int young_delta2(const YoungOptions& o, std::ostream& out) {
  const auto phi = YoungFunction::parse(o.phi);
  const auto grid = parse_explicit_grid(o.grid.empty() ? "log:1e-6:1e2:161" : o.grid);
  const auto r = delta2_index(phi, grid, o.cap);
  out << "index,verdict\n" << csv::format_number(r.index) << ',' << (r.delta2 ? "delta2" : "not-delta2") << '\n';
  return kExitOk;
}

int young_eval(const YoungOptions& o, std::ostream& out) {
  const auto phi = YoungFunction::parse(o.phi);
  std::string text = "t,phi\n";
  for (double t : parse_explicit_grid(o.at)) text += csv::join_row({t, eval_young(phi, t)}) + "\n";
  out << text;
  return kExitOk;
}

int young_majorant(const YoungOptions& o, std::ostream& out) {
  const auto phi = YoungFunction::parse(o.phi);
  const auto phi1 = majorant_phi1(phi);
  std::string text = "x,phi,phi1\n";
  for (double x : parse_explicit_grid(o.grid.empty() ? "log:1e-6:1e6:400" : o.grid)) {
    text += csv::join_row({x, eval_young(phi, x), eval_young(phi1, x)}) + "\n";
  }
  out << text;
  return kExitOk;
}

struct NormOptions {
  std::string phi = "power:2";
  std::string kind = "luxemburg";
  double p = 1.0;
  std::string input;
  double tol = kDefaultLuxemburgTol;
  double k = 1.0;
};

int norm_command(const NormOptions& o, std::ostream& out) {
  const PiecewiseFn f = load_function(o.input);
  if (o.kind == "luxemburg") {
    const auto r = luxemburg_norm(YoungFunction::parse(o.phi), f, o.tol);
    out << "value,k_lo,k_hi\n" << csv::join_row({r.value, r.k_lo, r.k_hi}) << '\n';
  } else if (o.kind == "lp") {
    out << "value\n" << csv::format_number(lp_norm(f, o.p).value) << '\n';
  } else if (o.kind == "linf") {
    out << "value\n" << csv::format_number(lp_norm(f, kInfinity).value) << '\n';
  } else if (o.kind == "modular") {
    out << "value\n" << csv::format_number(modular(YoungFunction::parse(o.phi), f, o.k)) << '\n';
  } else {
    throw ParseError("unknown norm kind '" + o.kind + "' (expected luxemburg, lp, linf, modular)");
  }
  return kExitOk;
}

struct SimulateOptions {
  std::string model;
  std::string x0;
  std::string input;
  double t = 0.0;
  std::string out;
};

int simulate_command(const SimulateOptions& o, std::ostream& out) {
  const SystemModel model = parse_model(o.model);
  const StateFn x0 = load_state(model, o.x0);
  Input u = ZeroInput{};
  if (!o.input.empty()) {
    const PiecewiseFn f = load_function(o.input);
    if (std::holds_alternative<TranslationL1>(model)) {
      // the file is the state-valued input, held constant on [0, t]
      if (o.t > 0.0) u = StateSegments{{0.0, o.t}, {f}};
    } else {
      u = ScalarSignal{f};
    }
  }
  const StateFn x = mild_solution(model, x0, u, o.t);
  std::string text;
  if (const auto* f = std::get_if<PiecewiseFn>(&x)) {
    text = to_csv(*f);
  } else {
    text = "k,x\n";
    const auto& seq = std::get<Sequence>(x);
    for (std::size_t k = 0; k < seq.size(); ++k) text += csv::join_row({static_cast<double>(k + 1), seq[k]}) + "\n";
  }
  text += "# norm=" + csv::format_number(state_norm(x)) + "\n";
  write_output(text, o.out, out);
  return kExitOk;
}

struct FamilyOptions {
  std::string family = "shifted-bumps";
  std::string phi = "power:2";
  std::size_t blocks = 40;
  std::uint64_t seed = 0;
};

struct AdmissibilityOptions {
  std::string model;
  std::string z = "l1";
  std::string t_grid = "log:1:1e6:13";
  double growth = 2.0;
  std::string out;
  FamilyOptions fam;
};

SeparableInput counterexample_input(const FamilyOptions& f) {
  return build_counterexample(YoungFunction::parse(f.phi), f.blocks).input;
}

int admissibility_command(const AdmissibilityOptions& o, std::ostream& out, std::ostream& err) {
  const SystemModel model = parse_model(o.model);
  const NormSpec z = parse_norm_spec(o.z);
  FamilyGenerator family;
  if (o.fam.family == "shifted-bumps") {
    family = [model](double t) { return shifted_bumps(model, t); };
  } else if (o.fam.family == "constant") {
    family = [model](double t) { return constant_family(model, t); };
  } else if (o.fam.family == "random-bumps") {
    family = [model, seed = o.fam.seed](double t) { return random_bumps(model, t, seed); };
  } else if (o.fam.family == "counterexample") {
    if (!std::holds_alternative<TranslationL1>(model)) throw ParseError("the counterexample family needs --model translation");
    family = counterexample_family(counterexample_input(o.fam));
  } else {
    throw ParseError("unknown family '" + o.fam.family + "'");
  }
  const auto report = infinite_time_verdict(model, z, parse_explicit_grid(o.t_grid), family, o.growth);
  std::string text = "t,best_ratio,witness,verdict\n";
  for (const auto& e : report.entries) {
    text += fmt::format("{},{},{},{}\n", csv::format_number(e.t), csv::format_number(e.best_ratio), e.witness,
                        verdict_name(report.verdict));
    for (const auto& w : e.warnings) err << "oiss: warning: " << w << '\n';
  }
  write_output(text, o.out, out);
  return kExitOk;
}

struct CounterexampleOptions {
  std::string phi = "power:2";
  std::size_t blocks = 40;
  std::string t_grid = "breakpoints";
  std::string tk;
  double tol = kDefaultLuxemburgTol;
  std::string out;
  std::string dump;
};

int counterexample_command(const CounterexampleOptions& o, std::ostream& out) {
  std::optional<std::vector<double>> tk;
  if (!o.tk.empty()) {
    tk.emplace();
    for (const auto& part : csv::split(o.tk, ',')) tk->push_back(csv::parse_double(part));
  }
  const auto report = run_counterexample(YoungFunction::parse(o.phi), o.blocks, parse_grid(o.t_grid), tk, o.tol);
  if (!o.dump.empty()) dump_functions(report.construction, o.dump);
  write_output(report_csv(report), o.out, out);
  return kExitOk;
}

struct VerifyOptions {
  std::string mode = "siss";
  std::string model;
  std::string z = "l1";
  std::string t_grid;
  std::string x0;
  std::string beta = "orbit";
  std::string mu = "id";
  std::string theta = "id";
  std::string out;
  FamilyOptions fam{"constant", "power:2", 40, 0};
};

int verify_command(const VerifyOptions& o, std::ostream& out) {
  const SystemModel model = parse_model(o.model);
  const StateFn x0 = load_state(model, o.x0);
  InputAt input_at;
  std::vector<double> grid;
  if (o.fam.family == "counterexample") {
    if (!std::holds_alternative<TranslationL1>(model)) throw ParseError("the counterexample family needs --model translation");
    const auto c = build_counterexample(YoungFunction::parse(o.fam.phi), o.fam.blocks);
    // reversed in time, so that x(t) = Phi_t(u) for x0 = 0
    input_at = [u = c.input](double t) -> Input { return ReversedSeparable{u, t}; };
    const GridSpec spec = parse_grid(o.t_grid.empty() ? "breakpoints" : o.t_grid);
    if (std::holds_alternative<BlockBreakpoints>(spec)) {
      grid.assign(c.u0.blocks.breakpoints.begin() + 1, c.u0.blocks.breakpoints.end());
    } else {
      grid = std::get<std::vector<double>>(spec);
    }
  } else {
    if (o.fam.family == "constant") {
      input_at = [model](double t) { return constant_family(model, t).front().input; };
    } else if (o.fam.family == "shifted-bumps") {
      input_at = [model](double t) { return shifted_bumps(model, t).back().input; };
    } else {
      throw ParseError("unknown family '" + o.fam.family + "' (expected constant, shifted-bumps, counterexample)");
    }
    grid = parse_explicit_grid(o.t_grid.empty() ? "0.5,1,2,5" : o.t_grid);
  }
  CertificateOptions options;
  options.slack = certificate_slack();
  const ComparisonFn beta = parse_beta(o.beta, model, x0);
  CertificateReport report;
  if (o.mode == "siss") {
    report = verify_siss(model, x0, input_at, grid, beta, parse_gain(o.mu), parse_norm_spec(o.z), options);
  } else if (o.mode == "siiss") {
    report = verify_siiss(model, x0, input_at, grid, beta, parse_gain(o.theta), parse_gain(o.mu), options);
  } else {
    throw ParseError("unknown mode '" + o.mode + "' (expected siss, siiss)");
  }
  std::string text = "t,lhs,rhs,pass\n";
  for (const auto& r : report.rows) {
    text += fmt::format("{},{},{},{}\n", csv::format_number(r.t), csv::format_number(r.lhs), csv::format_number(r.rhs),
                        r.pass ? "pass" : "fail");
  }
  write_output(text, o.out, out);
  return report.pass ? kExitOk : kExitVerdictFailed;
}

void add_family_options(CLI::App* cmd, FamilyOptions& f) {
  cmd->add_option("--family", f.family, "Input family");
  cmd->add_option("--phi", f.phi, "Young function for the counterexample family");
  cmd->add_option("--blocks", f.blocks, "Blocks of the counterexample family")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Seed for random-bumps");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const Error& e) {
    err << "oiss: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Orlicz-space ISS toolbox", "oiss"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  YoungOptions yo;
  auto* young = app.add_subcommand("young", "Young function checks");
  young->require_subcommand(1);
  auto* ycheck = young->add_subcommand("check", "Validate the defining properties");
  auto* ydelta = young->add_subcommand("delta2", "Delta_2 classifier");
  auto* yeval = young->add_subcommand("eval", "Evaluate Phi");
  auto* ymaj = young->add_subcommand("majorant", "Tabulate Phi and the majorant Phi1");
  for (auto* c : {ycheck, ydelta, yeval, ymaj}) c->add_option("--phi", yo.phi, "Young function")->required();
  for (auto* c : {ycheck, ydelta, ymaj}) c->add_option("--grid", yo.grid, "Sample grid");
  ycheck->add_option("--threshold", yo.threshold, "Divergence threshold for phi(s_max)");
  ydelta->add_option("--cap", yo.cap, "Ratio cap for the not-Delta_2 verdict");
  yeval->add_option("--t", yo.at, "Points (grid spec)")->required();

  NormOptions no;
  auto* norm = app.add_subcommand("norm", "Norm of a piecewise function");
  norm->add_option("--phi", no.phi, "Young function");
  norm->add_option("--kind", no.kind, "luxemburg, lp, linf or modular");
  norm->add_option("--p", no.p, "Exponent for --kind lp");
  norm->add_option("--input", no.input, "Piecewise CSV or a constant")->required();
  norm->add_option("--tol", no.tol, "Relative Luxemburg tolerance");
  norm->add_option("--k", no.k, "Scale for --kind modular");

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "Mild solution at time t");
  sim->add_option("--model", so.model, "translation, scalar:L:B or diagonal:PATH")->required();
  sim->add_option("--x0", so.x0, "Initial state");
  sim->add_option("--input", so.input, "Input (piecewise CSV or constant)");
  sim->add_option("--t", so.t, "Final time")->required();
  sim->add_option("--out", so.out, "Output file");

  AdmissibilityOptions ao;
  auto* adm = app.add_subcommand("admissibility", "Admissibility constants and verdict");
  adm->add_option("--model", ao.model, "System model")->required();
  adm->add_option("--z", ao.z, "Input norm");
  adm->add_option("--t-grid", ao.t_grid, "Time grid");
  adm->add_option("--growth", ao.growth, "Growth factor for unbounded evidence");
  adm->add_option("--out", ao.out, "Output file");
  add_family_options(adm, ao.fam);

  CounterexampleOptions co;
  auto* cex = app.add_subcommand("counterexample", "Build and certify the counterexample");
  cex->add_option("--phi", co.phi, "Young function");
  cex->add_option("--blocks", co.blocks, "Number of blocks K")->check(CLI::PositiveNumber);
  cex->add_option("--t-grid", co.t_grid, "breakpoints or a grid spec");
  cex->add_option("--tk", co.tk, "Explicit comma list of t_k");
  cex->add_option("--tol", co.tol, "Relative Luxemburg tolerance");
  cex->add_option("--out", co.out, "Report CSV");
  cex->add_option("--dump-functions", co.dump, "Directory for u0.csv, h.csv, g.csv");

  VerifyOptions vo;
  auto* ver = app.add_subcommand("verify", "Check an sISS or siISS certificate");
  ver->add_option("--mode", vo.mode, "siss or siiss");
  ver->add_option("--model", vo.model, "System model")->required();
  ver->add_option("--z", vo.z, "Input norm for siss");
  ver->add_option("--t-grid", vo.t_grid, "Time grid");
  ver->add_option("--x0", vo.x0, "Initial state");
  ver->add_option("--beta", vo.beta, "orbit or exp:M:OMEGA");
  ver->add_option("--mu", vo.mu, "Gain mu");
  ver->add_option("--theta", vo.theta, "Gain theta (siiss)");
  ver->add_option("--out", vo.out, "Output file");
  add_family_options(ver, vo.fam);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "oiss: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ycheck) return young_check(yo, out);
    if (*ydelta) return young_delta2(yo, out);
    if (*yeval) return young_eval(yo, out);
    if (*ymaj) return young_majorant(yo, out);
    if (*norm) return norm_command(no, out);
    if (*sim) return simulate_command(so, out);
    if (*adm) return admissibility_command(ao, out, err);
    if (*cex) return counterexample_command(co, out);
    if (*ver) return verify_command(vo, out);
  } catch (const RejectedCertificateError& e) {
    err << "oiss: certificate rejected: " << e.what() << '\n';
    return kExitVerdictFailed;
  } catch (const std::exception& e) {
    err << "oiss: error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace oiss::cli
