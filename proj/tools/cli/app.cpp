#include "cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/analysis.hpp"
#include "cli/figures.hpp"
#include "sharpfid/error.hpp"

namespace sharpfid::cli {

namespace {

struct Flags {
  AnalysisSpec spec;
  std::optional<double> sigma;
  std::optional<std::string> bump;
};

void add_analysis_flags(CLI::App* app, Flags& f) {
  AnalysisSpec& s = f.spec;
  app->add_option("--xbar", s.xbar, "Sample mean");
  app->add_option("--sd", s.sd, "Sample standard deviation (unknown-variance models)");
  app->add_option("--sigma", f.sigma, "Known standard deviation (normal-known), or alias of --sd");
  app->add_option("--se", s.se, "Standard error of the mean (normal-known)");
  app->add_option("--n", s.n, "Sample size or number of trials");
  app->add_option("--x", s.x, "Observed count (binomial)");
  app->add_option("--e-t", s.e_t, "Treatment events");
  app->add_option("--n-t", s.n_t, "Treatment size");
  app->add_option("--e-c", s.e_c, "Control events");
  app->add_option("--n-c", s.n_c, "Control size");
  app->add_option("--eps", s.eps, "Half width of the hypothesis interval");
  app->add_option("--center", s.center, "Centre of the hypothesis interval");
  app->add_option("--lo", s.lo, "Lower end of the hypothesis interval");
  app->add_option("--hi", s.hi, "Upper end of the hypothesis interval");
  app->add_option("--prior", s.prior, "Prior probability of the hypothesis");
  app->add_option("--gpd", s.gpd, "flat or smoothed")->check(CLI::IsMember({"flat", "smoothed"}));
  app->add_option("--bump", f.bump, "Bump shape as alpha,beta (default 4,4)");
  app->add_option("--tau", s.tau, "Fixed smoothing constant instead of the continuity solve");
  app->add_option("--samples", s.samples, "Monte Carlo sample size");
  app->add_option("--burn-in", s.burn_in, "Gibbs burn-in sweeps");
  app->add_option("--seed", s.seed, "RNG seed (falls back to SHARPFID_SEED, then 1)");
  app->add_option("--scan", s.scan, "Gibbs scan: fixed:mu-sigma, fixed:sigma-mu or random");
  app->add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  app->add_flag("--jeffreys", s.jeffreys, "Relative risk: Jeffreys-posterior approximation");
  app->add_option("--out", s.out, "Directory for result and table files");
  app->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void finish_flags(Flags& f) {
  if (f.sigma) {
    if (f.spec.sd) throw ValidationError("give --sigma or --sd, not both");
    f.spec.sd = f.sigma;
  }
  if (f.bump) {
    std::istringstream in(*f.bump);
    char comma = 0;
    double a = 0.0, b = 0.0;
    if (!(in >> a >> comma >> b) || comma != ',' || !(in >> std::ws).eof()) {
      throw ValidationError("--bump expects alpha,beta, got '" + *f.bump + "'");
    }
    f.spec.bump_alpha = a;
    f.spec.bump_beta = b;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Post-data probabilities and densities for sharp and almost-sharp hypotheses"};
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, std::unique_ptr<Flags>>> model_cmds;
  for (const std::string& name : model_names()) {
    auto flags = std::make_unique<Flags>();
    flags->spec.model = name;
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " analysis");
    add_analysis_flags(sub, *flags);
    model_cmds.emplace_back(sub, std::move(flags));
  }

  Flags run_flags;
  std::optional<std::string> spec_path;
  CLI::App* run = app.add_subcommand("run", "Run an analysis from a JSON spec or from flags");
  run->add_option("--spec", spec_path, "JSON spec file (schema 1)");
  run->add_option("--model", run_flags.spec.model, "Model when no spec file is given");
  add_analysis_flags(run, run_flags);

  int figure_id = 0;
  FigureOptions fig;
  std::optional<std::uint64_t> fig_seed;
  CLI::App* figure = app.add_subcommand("figure", "Write the CSV data behind one figure");
  figure->add_option("id", figure_id, "Figure number, 1 to 9")->required();
  figure->add_option("--out", fig.out_dir, "Output directory")->required();
  figure->add_option("--seed", fig_seed, "RNG seed (falls back to SHARPFID_SEED, then 1)");
  figure->add_flag("--paper-scale", fig.paper_scale, "Use the full Monte Carlo sample sizes");
  figure->add_option("--threads", fig.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (figure->parsed()) {
      fig.seed = resolve_seed(fig_seed);
      for (const auto& p : write_figure(figure_id, fig)) out << p.string() << "\n";
      return 0;
    }
    Flags* chosen = nullptr;
    if (run->parsed()) {
      if (spec_path) {
        if (!run_flags.spec.model.empty()) {
          throw ValidationError("give either --spec or --model, not both");
        }
        AnalysisSpec spec = parse_spec_json(read_file(*spec_path));
        // Command-line output settings override the spec's.
        if (run_flags.spec.out) spec.out = run_flags.spec.out;
        if (run->count("--format")) spec.format = run_flags.spec.format;
        emit(spec, run_analysis(spec), out);
        return 0;
      }
      if (run_flags.spec.model.empty()) throw ValidationError("run needs --spec or --model");
      chosen = &run_flags;
    } else {
      for (auto& [sub, flags] : model_cmds) {
        if (sub->parsed()) chosen = flags.get();
      }
    }
    finish_flags(*chosen);
    emit(chosen->spec, run_analysis(chosen->spec), out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::validation ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sharpfid::cli
