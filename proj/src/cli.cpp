#include "awr/cli.hpp"

#include "awr/errors.hpp"
#include "awr/io.hpp"
#include "awr/pipeline.hpp"
#include "awr/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace awr {

namespace {

using nlohmann::json;

double
parse_number(const std::string& text, const std::string& what)
{
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw input_error("bad-flag", "cannot parse " + what + " '" + text + "'");
  return v;
}

std::vector<std::string>
split(const std::string& text, char sep)
{
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string::npos ? pos : pos - start));
    if (pos == std::string::npos)
      break;
    start = pos + 1;
  }
  return parts;
}

BandwidthChoice
parse_bandwidth(const std::string& bandwidth, const std::string& cv_grid)
{
  BandwidthChoice choice;
  if (bandwidth != "cv") {
    double h = parse_number(bandwidth, "bandwidth");
    if (!(h > 0.0))
      throw input_error("bad-bandwidth", "bandwidth must be positive");
    choice.fixed = h;
  }
  if (!cv_grid.empty()) {
    auto parts = split(cv_grid, ':');
    if (parts.size() != 3)
      throw input_error("bad-grid", "--cv-grid expects <min>:<max>:<count>");
    double lo = parse_number(parts[0], "grid minimum");
    double hi = parse_number(parts[1], "grid maximum");
    double count = parse_number(parts[2], "grid count");
    if (count < 1 || count != std::floor(count))
      throw input_error("bad-grid", "grid count must be a positive integer");
    choice.grid = geometric_grid(lo, hi, static_cast<int>(count));
  }
  return choice;
}

/// CLI11 only reads config files attached to the top-level app, so the
/// simulate file is expanded into flags here. They go ahead of the
/// command-line flags, and the last occurrence of a flag wins.
std::vector<std::string>
expand_config(const std::vector<std::string>& args)
{
  if (args.empty() || args[0] != "simulate")
    return args;
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (!path)
    return args;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(*path);
  } catch (const CLI::FileError&) {
    throw input_error("bad-file", "cannot read config file '" + *path + "'");
  }
  std::vector<std::string> out{ "simulate" };
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--")
      continue;
    out.push_back("--" + item.fullname());
    for (const auto& v : item.inputs)
      out.push_back(v);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void
report_error(std::ostream& err, const Error& e)
{
  json body = { { "error",
                  { { "category", e.category() == ErrorCategory::Input ? "input" : "numerical" },
                    { "kind", e.kind() },
                    { "message", e.what() } } } };
  err << dump_json(body) << '\n';
}

int
exit_code(const Error& e)
{
  return e.category() == ErrorCategory::Input ? kExitInput : kExitNumerical;
}

struct FitArgs
{
  std::string data;
  std::string loss = "square";
  std::string weights = "constant";
  std::string bandwidth = "cv";
  std::string cv_grid;
  std::string epsilon = "auto";
  std::string epsilon_norm = "slope";
  std::string sigma = "disc";
  std::string beta0;
  std::uint64_t seed = kDefaultSeed;
};

struct SimArgs
{
  int n = 500;
  int q = 4;
  std::string sigma = "smooth";
  std::string methods = "first-step,parametric,np,sp,oracle";
  int reps = 200;
  std::uint64_t seed = kDefaultSeed;
  std::string bandwidth = "cv";
  std::string cv_grid;
  std::string loss = "square";
  std::string out = ".";
  int workers = 1;
};

int
cmd_fit(const FitArgs& a, std::ostream& out)
{
  Dataset data = read_csv(a.data);
  LossFunction loss = LossFunction::parse(a.loss);
  BandwidthChoice bw = parse_bandwidth(a.bandwidth, a.cv_grid);
  SigmaKind sigma = parse_sigma_kind(a.sigma);

  WeightSpec spec;
  if (a.weights == "constant") {
    spec = weight_spec::Constant{};
  } else if (a.weights == "parametric") {
    spec = weight_spec::Parametric{ inverse_variance_family(sigma) };
  } else if (a.weights == "np") {
    spec = weight_spec::Nonparametric{ bw };
  } else if (a.weights == "sp-index") {
    spec = weight_spec::SemiparametricIndex{ bw };
  } else if (a.weights == "sp-proj") {
    weight_spec::SemiparametricProjected s{ bw, std::nullopt };
    if (a.epsilon != "auto") {
      double e = parse_number(a.epsilon, "epsilon");
      if (!(e >= 0.0))
        throw input_error("bad-epsilon", "epsilon must be nonnegative");
      s.epsilon = e;
    }
    if (a.epsilon_norm == "full")
      s.norm = EpsilonNorm::Full;
    else if (a.epsilon_norm != "slope")
      throw input_error("bad-flag", "--epsilon-norm expects slope or full");
    spec = s;
  } else if (a.weights == "oracle") {
    Eigen::VectorXd beta0 = true_beta(static_cast<int>(data.q()));
    if (!a.beta0.empty()) {
      auto parts = split(a.beta0, ',');
      if (static_cast<Eigen::Index>(parts.size()) != data.q() + 1)
        throw input_error("bad-flag", "--beta0 needs 1 + q comma-separated values");
      for (std::size_t k = 0; k < parts.size(); ++k)
        beta0[static_cast<Eigen::Index>(k)] = parse_number(parts[k], "beta0 entry");
    }
    spec = weight_spec::Oracle{ oracle_family(sigma, beta0) };
  } else {
    throw input_error("bad-flag",
                      "unknown --weights '" + a.weights +
                        "' (expected constant, parametric, np, sp-index, sp-proj or oracle)");
  }

  AdaptiveFit result = adaptive_fit(data, loss, spec);
  json report = fit_report_json(result, a.weights, loss);
  report["n"] = data.n();
  report["q"] = data.q();
  report["seed"] = a.seed;
  out << dump_json(report) << '\n';
  return kExitOk;
}

int
cmd_simulate(const SimArgs& a, std::ostream& out, std::ostream& err)
{
  SimConfig config;
  config.n = a.n;
  config.q = a.q;
  config.sigma = parse_sigma_kind(a.sigma);
  config.methods.clear();
  for (const auto& m : split(a.methods, ','))
    config.methods.push_back(parse_method(m));
  config.replications = a.reps;
  config.seed = a.seed;
  config.bandwidth = parse_bandwidth(a.bandwidth, a.cv_grid);
  config.loss = LossFunction::parse(a.loss);
  config.workers = a.workers;
  config.validate();

  std::filesystem::path dir(a.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw input_error("bad-file", "cannot create output directory '" + a.out + "'");

  SimSummary summary = summarize_study(config, run_replications(config));
  {
    std::ofstream csv(dir / "errors.csv", std::ios::binary);
    if (!csv)
      throw input_error("bad-file", "cannot write errors.csv");
    write_errors_csv(csv, summary);
  }
  std::string text = dump_json(sim_summary_json(summary));
  {
    std::ofstream js(dir / "summary.json", std::ios::binary);
    if (!js)
      throw input_error("bad-file", "cannot write summary.json");
    js << text << '\n';
  }
  out << text << '\n';
  try {
    check_study(summary);
  } catch (const Error& e) {
    report_error(err, e);
    return kExitNumerical;
  }
  return kExitOk;
}

} // namespace

int
run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Adaptively weighted regression for heteroscedastic linear models", "awr" };
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit coefficients with estimated weights and print a JSON report");
  fit->add_option("--data", fa.data, "CSV file with a 'y' column and covariates")->required();
  fit->add_option("--loss", fa.loss, "square | huber:<c> | power:<p>");
  fit->add_option("--weights", fa.weights, "constant | parametric | np | sp-index | sp-proj | oracle");
  fit->add_option("--bandwidth", fa.bandwidth, "cv | <h>");
  fit->add_option("--cv-grid", fa.cv_grid, "<min>:<max>:<count> geometric grid for cv");
  fit->add_option("--epsilon", fa.epsilon, "auto | <e> (sp-proj)");
  fit->add_option("--epsilon-norm", fa.epsilon_norm, "slope | full coefficient norm in auto epsilon");
  fit->add_option("--sigma", fa.sigma, "smooth | disc | homo variance family (parametric, oracle)");
  fit->add_option("--beta0", fa.beta0, "comma-separated true coefficients for oracle weights");
  fit->add_option("--seed", fa.seed, "random seed (recorded in the report)");

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run the Monte Carlo comparison study");
  sim->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_file;
  sim->add_option("--config", config_file, "flat key = value file with the same keys as the flags");
  sim->add_option("--n", sa.n, "sample size");
  sim->add_option("--q", sa.q, "covariate dimension");
  sim->add_option("--sigma", sa.sigma, "smooth | disc | homo");
  sim->add_option("--methods", sa.methods, "comma list of first-step,parametric,np,sp,sp-index,oracle");
  sim->add_option("--reps", sa.reps, "replications");
  sim->add_option("--seed", sa.seed, "random seed");
  sim->add_option("--bandwidth", sa.bandwidth, "cv | <h>");
  sim->add_option("--cv-grid", sa.cv_grid, "<min>:<max>:<count>");
  sim->add_option("--loss", sa.loss, "square | huber:<c> | power:<p>");
  sim->add_option("--out", sa.out, "output directory for errors.csv and summary.json");
  sim->add_option("--workers", sa.workers, "worker threads (results do not depend on it)");

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const Error& e) {
    report_error(err, e);
    return exit_code(e);
  }

  try {
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (*fit)
      return cmd_fit(fa, out);
    return cmd_simulate(sa, out, err);
  } catch (const Error& e) {
    report_error(err, e);
    return exit_code(e);
  } catch (const std::exception& e) {
    report_error(err, input_error("io", e.what()));
    return kExitInput;
  }
}

} // namespace awr
