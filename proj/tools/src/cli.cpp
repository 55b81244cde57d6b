#include "lens/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "lens/catalog.hpp"
#include "lens/caustics.hpp"
#include "lens/error.hpp"
#include "lens/imaging.hpp"
#include "lens/lefschetz.hpp"

namespace lens::cli {

namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string model;
  std::optional<double> c;
  std::optional<double> p;
  std::string y;
  int trials = 1000;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  std::string window;
  std::string resolution;
  std::string output_path;
  std::string format;
  std::string method = "auto";
  int samples = 1000;
};

std::vector<double> parse_reals(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != count)
    throw UsageError(std::string(flag) + " expects " + std::to_string(count) +
                     " comma-separated values, got '" + text + "'");
  for (double v : out)
    if (!std::isfinite(v)) throw UsageError(std::string(flag) + ": values must be finite");
  return out;
}

// Adding +0.0 turns -0.0 into 0.0.
double tidy(double v) { return v + 0.0; }

ojson complex_json(cplx z) { return ojson::array({tidy(z.real()), tidy(z.imag())}); }

ojson params_json(const ControlParams& p) {
  ojson j = ojson::object();
  if (p.c) j["c"] = *p.c;
  if (p.p) j["p"] = *p.p;
  return j;
}

ojson interval_json(const Interval& iv) { return ojson::array({iv.lo, iv.hi}); }

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", tidy(v));
  return buf;
}

ModelId single_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw UsageError("--model is required");
  if (cfg.model == "all") throw UsageError("--model all is only accepted by verify");
  return parse_model(cfg.model);
}

ControlParams control_params(const RunConfig& cfg, bool require_y) {
  ControlParams p;
  p.c = cfg.c;
  p.p = cfg.p;
  if (!cfg.y.empty()) {
    const auto v = parse_reals(cfg.y, 2, "--y");
    p.y = {v[0], v[1]};
  } else if (require_y) {
    throw UsageError("--y is required");
  }
  return p;
}

void require_format(const RunConfig& cfg, std::string_view expected) {
  if (!cfg.format.empty() && cfg.format != expected)
    throw UsageError("this subcommand writes " + std::string(expected) + ", not " + cfg.format);
}

ojson solution_set_json(const SolutionSet& ss) {
  ojson doc;
  doc["model"] = std::string(to_string(ss.model_id));
  doc["params"] = params_json(ss.params);
  doc["source"] = ojson::array({ss.source[0], ss.source[1]});
  ojson sols = ojson::array();
  cplx sum_all{};
  double sum_real = 0.0;
  int n_real = 0;
  for (const Solution& s : ss.solutions) {
    ojson e;
    e["x"] = ojson::array({complex_json(s.position[0]), complex_json(s.position[1])});
    e["real"] = s.is_real;
    e["det_j"] = complex_json(s.det_jacobian);
    e["mu"] = complex_json(s.magnification);
    e["residual"] = s.residual;
    sols.push_back(std::move(e));
    sum_all += s.magnification;
    if (s.is_real) {
      sum_real += s.magnification.real();
      ++n_real;
    }
  }
  doc["solutions"] = std::move(sols);
  doc["sum_all"] = complex_json(sum_all);
  doc["sum_real"] = sum_real;
  doc["n_real"] = n_real;
  return doc;
}

struct Emitted {
  std::string text;
  int code = kExitOk;
};

Emitted cmd_solve(const RunConfig& cfg) {
  require_format(cfg, "json");
  const ModelId id = single_model(cfg);
  const CatastropheModel model = instantiate(id, control_params(cfg, true));
  const SolutionSet ss = solve_images(model);
  Emitted e{solution_set_json(ss).dump(2) + "\n"};
  switch (ss.status) {
    case SolveStatus::complete: e.code = kExitOk; break;
    case SolveStatus::incomplete: e.code = kExitIncomplete; break;
    case SolveStatus::caustic: e.code = kExitCaustic; break;
  }
  return e;
}

Emitted cmd_verify(const RunConfig& cfg) {
  require_format(cfg, "json");
  if (cfg.model.empty()) throw UsageError("--model is required");
  if (cfg.trials < 0) throw UsageError("--trials must be non-negative");
  std::vector<ModelId> models;
  if (cfg.model == "all")
    models.assign(kAllModels.begin(), kAllModels.end());
  else
    models.push_back(parse_model(cfg.model));

  ojson doc;
  doc["generator"] = std::string(kGeneratorName);
  doc["seed"] = cfg.seed;
  doc["trials"] = cfg.trials;
  doc["tol"] = cfg.tol;
  ojson reports = ojson::array();
  bool all_passed = true;
  for (ModelId id : models) {
    SamplingBox box = default_box(id);
    if (cfg.c) {
      if (!uses_c(id)) throw UsageError("--c does not apply to " + std::string(to_string(id)));
      box.shape = {*cfg.c, *cfg.c};
    }
    if (cfg.p) {
      if (!uses_p(id)) throw UsageError("--p does not apply to " + std::string(to_string(id)));
      box.shape = {*cfg.p, *cfg.p};
    }
    const BatchReport r = verify_invariant(id, cfg.trials, cfg.seed, box, cfg.tol);
    ojson m;
    m["model"] = std::string(to_string(id));
    ojson jb;
    jb["y1"] = interval_json(box.y1);
    jb["y2"] = interval_json(box.y2);
    if (uses_c(id)) jb["c"] = interval_json(box.shape);
    if (uses_p(id)) jb["p"] = interval_json(box.shape);
    m["box"] = std::move(jb);
    m["trials"] = r.trials;
    m["accepted"] = r.accepted;
    m["rejected_near_caustic"] = r.rejected_near_caustic;
    m["rejected_unsolved"] = r.rejected_unsolved;
    m["max_normalized_defect"] = r.max_normalized_defect;
    m["all_real_trials"] = r.all_real_trials;
    m["all_real_vanished"] = r.all_real_vanished;
    m["max_real_defect"] = r.max_real_defect;
    m["passed"] = r.passed();
    all_passed = all_passed && r.passed();
    reports.push_back(std::move(m));
  }
  doc["models"] = std::move(reports);
  doc["passed"] = all_passed;
  return {doc.dump(2) + "\n", all_passed ? kExitOk : kExitFailed};
}

Emitted cmd_lefschetz(const RunConfig& cfg) {
  require_format(cfg, "json");
  const ModelId id = single_model(cfg);
  const CatastropheModel model = instantiate(id, control_params(cfg, false));
  const LefschetzReport rep = lefschetz_total(model);
  ojson doc;
  doc["model"] = std::string(to_string(id));
  doc["params"] = params_json(model.params());
  doc["source"] = ojson::array({model.source()[0], model.source()[1]});
  doc["affine_sum"] = complex_json(rep.affine_sum);
  ojson pts = ojson::array();
  for (const InfinityFixedPoint& q : rep.infinity_points) {
    ojson e;
    e["point"] = ojson::array({complex_json(0.0), complex_json(q.point[0]), complex_json(q.point[1])});
    e["lambda"] = complex_json(q.multiplier);
    e["index"] = complex_json(q.index);
    pts.push_back(std::move(e));
  }
  doc["infinity_fixed_points"] = std::move(pts);
  doc["infinity_sum"] = complex_json(rep.infinity_sum);
  doc["total"] = complex_json(rep.total);
  const double defect = std::abs(rep.total - rep.expected);
  doc["defect"] = defect;
  return {doc.dump(2) + "\n", defect <= cfg.tol ? kExitOk : kExitFailed};
}

CriticalMethod parse_method(const std::string& m) {
  if (m == "auto") return CriticalMethod::automatic;
  if (m == "closed-form") return CriticalMethod::closed_form;
  if (m == "contour") return CriticalMethod::contour;
  throw UsageError("--method must be auto, closed-form or contour");
}

Emitted cmd_caustic(const RunConfig& cfg) {
  require_format(cfg, "csv");
  if (cfg.samples < 0) throw UsageError("--samples must be non-negative");
  std::string text = "t,x1,x2,y1,y2,beta,is_cusp\n";
  if (cfg.samples == 0) return {text};
  const ModelId id = single_model(cfg);
  const CatastropheModel model = instantiate(id, control_params(cfg, false));
  CriticalCurveOptions opts;
  opts.method = parse_method(cfg.method);
  CriticalCurve curve;
  try {
    curve = critical_curve(model, cfg.samples, opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::empty_critical_set) return {text};
    throw;
  }
  caustic_map(model, curve.points);
  std::vector<char> is_cusp(curve.points.size(), 0);
  for (const CuspLocation& c : beta_cusp_detect(model, curve)) is_cusp[c.nearest_sample] = 1;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const CriticalPoint& p = curve.points[i];
    text += format_g17(p.parameter_t) + ',' + format_g17(p.x[0]) + ',' + format_g17(p.x[1]) + ',' +
            format_g17(p.caustic_y[0]) + ',' + format_g17(p.caustic_y[1]) + ',' +
            format_g17(p.beta) + ',' + (is_cusp[i] ? '1' : '0') + '\n';
  }
  return {text};
}

Emitted cmd_sweep(const RunConfig& cfg) {
  require_format(cfg, "csv");
  const ModelId id = single_model(cfg);
  if (cfg.window.empty()) throw UsageError("--window is required");
  if (cfg.resolution.empty()) throw UsageError("--resolution is required");
  const auto w = parse_reals(cfg.window, 4, "--window");
  const auto r = parse_reals(cfg.resolution, 2, "--resolution");
  if (r[0] < 1 || r[1] < 1 || r[0] != std::floor(r[0]) || r[1] != std::floor(r[1]))
    throw UsageError("--resolution expects two positive integers");
  if (!(w[0] < w[1]) || !(w[2] < w[3])) throw UsageError("--window expects lo < hi on both axes");
  const CatastropheModel model = instantiate(id, control_params(cfg, false));
  const ImageCountGrid g =
      image_count_grid(model, {w[0], w[1], w[2], w[3]}, static_cast<int>(r[0]), static_cast<int>(r[1]));

  std::string text = "y1,y2,n_real,sum_real_mu,rejected\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 y = g.cell_center(i, j);
      const std::size_t k = g.index(i, j);
      text += format_g17(y[0]) + ',' + format_g17(y[1]) + ',' + std::to_string(g.counts[k]) + ',' +
              format_g17(g.sum_real_mu[k]) + ',' + (g.rejected[k] ? '1' : '0') + '\n';
    }
  }
  return {text};
}

// Flat key=value file; keys mirror RunConfig field names.
std::vector<std::string> config_arguments(const std::string& path) {
  static const std::map<std::string, std::string> flags = {
      {"model", "--model"},     {"c", "--c"},         {"p", "--p"},
      {"y", "--y"},             {"trials", "--trials"}, {"seed", "--seed"},
      {"tol", "--tol"},         {"window", "--window"}, {"resolution", "--resolution"},
      {"output_path", "--output"}, {"output", "--output"}, {"format", "--format"},
      {"samples", "--samples"}, {"method", "--method"},
  };
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    const auto it = flags.find(key);
    if (it == flags.end())
      throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out.push_back(it->second + "=" + value);
  }
  return out;
}

// Splices config-file entries in front of the command-line flags so that
// explicit flags win (every option keeps its last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> explicit_args;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file");
      auto more = config_arguments(args[++i]);
      from_file.insert(from_file.end(), more.begin(), more.end());
    } else if (a.rfind("--config=", 0) == 0) {
      auto more = config_arguments(a.substr(9));
      from_file.insert(from_file.end(), more.begin(), more.end());
    } else {
      explicit_args.push_back(a);
    }
  }
  if (from_file.empty() || explicit_args.empty()) return explicit_args;
  std::vector<std::string> out{explicit_args.front()};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), explicit_args.begin() + 1, explicit_args.end());
  return out;
}

// A value that starts with '-' followed by a digit or '.' is a number, not a flag.
std::vector<std::string> join_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool is_flag = a.rfind("--", 0) == 0 && a.find('=') == std::string::npos;
    if (is_flag && i + 1 < args.size()) {
      const std::string& v = args[i + 1];
      if (v.size() >= 2 && v[0] == '-' && (std::isdigit(static_cast<unsigned char>(v[1])) || v[1] == '.')) {
        out.push_back(a + "=" + v);
        ++i;
        continue;
      }
    }
    out.push_back(a);
  }
  return out;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--model", cfg.model, "Model name")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--c", cfg.c, "Shape parameter c")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--p", cfg.p, "Shape parameter p")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--y", cfg.y, "Source position y1,y2")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--output", cfg.output_path, "Output file (default stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--trials", cfg.trials, "Trials per model (verify)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--seed", cfg.seed, "Base seed (verify)")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--tol", cfg.tol, "Acceptance tolerance (verify, lefschetz)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--samples", cfg.samples, "Points on the critical curve (caustic)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--method", cfg.method, "auto, closed-form or contour (caustic)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--window", cfg.window, "y1lo,y1hi,y2lo,y2hi (sweep)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--resolution", cfg.resolution, "nx,ny (sweep)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Image multiplets, magnification invariants and Lefschetz sums of polynomial lens maps",
               "lefschetz-lens"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  app.add_option("--config", "Flat key=value configuration file");

  CLI::App* solve = app.add_subcommand("solve", "Solve eta(x) = y and report magnifications");
  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo check of sum mu = 0");
  CLI::App* lef = app.add_subcommand("lefschetz", "Affine and infinity fixed-point indices");
  CLI::App* caustic = app.add_subcommand("caustic", "Critical curve, caustic and cusps as CSV");
  CLI::App* sweep = app.add_subcommand("sweep", "Real image counts over a source-plane grid as CSV");
  for (CLI::App* sub : {solve, verify, lef, caustic, sweep}) {
    add_common_options(sub, cfg);
    sub->add_option("--config", "Flat key=value configuration file");
  }
  try {
    std::vector<std::string> args = join_negative_values(expand_config(raw_args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Emitted result;
  try {
    if (*solve)
      result = cmd_solve(cfg);
    else if (*verify)
      result = cmd_verify(cfg);
    else if (*lef)
      result = cmd_lefschetz(cfg);
    else if (*caustic)
      result = cmd_caustic(cfg);
    else
      result = cmd_sweep(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << to_string(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::invalid_params:
      case ErrorCode::unknown_model: return kExitUsage;
      case ErrorCode::unequal_degrees: return kExitUnequalDegrees;
      case ErrorCode::incomplete_solve:
      case ErrorCode::incomplete: return kExitIncomplete;
      case ErrorCode::caustic_source: return kExitCaustic;
      default: return kExitFailed;
    }
  }

  if (cfg.output_path.empty()) {
    out << result.text;
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << cfg.output_path << "'\n";
      return kExitFailed;
    }
    f << result.text;
  }
  return result.code;
}

}  // namespace lens::cli
