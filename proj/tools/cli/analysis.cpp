#include "cli/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>

#include "sharpfid/models/binomial.hpp"
#include "sharpfid/models/normal_direct.hpp"
#include "sharpfid/models/normal_gibbs.hpp"
#include "sharpfid/models/normal_known.hpp"
#include "sharpfid/models/relative_risk.hpp"
#include "sharpfid/numerics/stats.hpp"

namespace sharpfid::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kCurvePoints = 1201;

template <class T>
T need(const std::optional<T>& v, const std::string& name, const std::string& model) {
  if (!v) throw ValidationError(model + ": missing required value '" + name + "'");
  return *v;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("spec: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ValidationError("spec: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& dst) {
  if (obj.contains(key) && !obj.at(key).is_null()) dst = obj.at(key).get<T>();
}

template <class T>
void read(const json& obj, const char* key, T& dst) {
  if (obj.contains(key) && !obj.at(key).is_null()) dst = obj.at(key).get<T>();
}

IntervalHypothesis make_hypothesis(const AnalysisSpec& spec, double default_center) {
  const double prior = spec.prior.value_or(0.5);
  if (spec.lo || spec.hi) {
    if (!(spec.lo && spec.hi)) throw ValidationError("hypothesis: give both lo and hi");
    if (spec.eps) throw ValidationError("hypothesis: give either eps or lo/hi, not both");
    return {*spec.lo, *spec.hi, prior};
  }
  const double eps = spec.eps.value_or(0.0);
  detail::require(eps >= 0.0, "hypothesis: eps must be non-negative");
  return IntervalHypothesis::symmetric(spec.center.value_or(default_center), eps, prior);
}

GpdSpec make_gpd(const AnalysisSpec& spec, const IntervalHypothesis& hyp) {
  const std::string kind = spec.gpd.value_or("flat");
  if (kind == "flat") {
    if (spec.tau) throw ValidationError("gpd: tau only applies to a smoothed GPD");
    return GpdSpec::flat();
  }
  if (kind != "smoothed") throw ValidationError("gpd: expected 'flat' or 'smoothed', got '" + kind + "'");
  return GpdSpec::smoothed(
      BumpDensity::beta_on_interval(spec.bump_alpha, spec.bump_beta, hyp.lo, hyp.hi), spec.tau);
}

McOptions mc_options(const AnalysisSpec& spec, std::size_t default_samples) {
  McOptions o;
  o.samples = spec.samples.value_or(default_samples);
  o.seed = resolve_seed(spec.seed);
  o.threads = spec.threads;
  detail::require(o.samples >= 2, "mc: samples must be at least 2");
  return o;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

ordered_json base_record(const std::string& model, const PostDataResult& r) {
  ordered_json rec;
  rec["model"] = model;
  rec["p_in"] = r.p_in;
  rec["p_out"] = r.p_out;
  rec["tau"] = optional_number(r.tau_used);
  rec["log_evidence_ratio"] = r.log_evidence_ratio;
  return rec;
}

void add_atom(ordered_json& rec, const PostDataResult& r) {
  const auto loc = r.density_in.atom_location();
  rec["atom_location"] = loc ? json(*loc) : json(nullptr);
  rec["atom_mass"] = loc ? json(r.p_in) : json(0.0);
}

std::vector<double> density_grid(double lo, double hi, const IntervalHypothesis& hyp) {
  std::vector<double> g = linspace(lo, hi, kCurvePoints);
  g.push_back(hyp.lo);
  g.push_back(hyp.hi);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

AnalysisOutput run_normal_known(const AnalysisSpec& spec) {
  const std::string m = spec.model;
  const double xbar = need(spec.xbar, "xbar", m);
  NormalKnownSummary s = spec.se ? NormalKnownSummary::from_se(xbar, *spec.se)
                                 : NormalKnownSummary(need(spec.n, "n", m), xbar,
                                                      need(spec.sd, "sigma", m));
  const IntervalHypothesis hyp = make_hypothesis(spec, 0.0);
  const PostDataResult r = normal_known::analyze(s, hyp, make_gpd(spec, hyp));

  AnalysisOutput out;
  out.record = base_record(m, r);
  out.record["se"] = s.se();
  add_atom(out.record, r);
  const double w = 6.0 * s.se();
  CsvTable t = curve_table();
  add_curve(t, r.mixture(),
            density_grid(std::min(xbar, hyp.lo) - w, std::max(xbar, hyp.hi) + w, hyp), "post_data");
  out.tables.emplace_back("density", std::move(t));
  return out;
}

AnalysisOutput run_normal_direct(const AnalysisSpec& spec) {
  const std::string m = spec.model;
  const NormalSummary s(need(spec.n, "n", m), need(spec.xbar, "xbar", m), need(spec.sd, "sd", m));
  const IntervalHypothesis hyp = make_hypothesis(spec, 0.0);
  const PostDataResult r = normal_direct::post_prob_direct(s, hyp, make_gpd(spec, hyp));

  AnalysisOutput out;
  out.record = base_record(m, r);
  add_atom(out.record, r);
  const double w = 8.0 * s.s / std::sqrt(static_cast<double>(s.n));
  CsvTable t = curve_table();
  add_curve(t, r.mixture(),
            density_grid(std::min(s.xbar, hyp.lo) - w, std::max(s.xbar, hyp.hi) + w, hyp),
            "post_data");
  out.tables.emplace_back("density", std::move(t));
  return out;
}

AnalysisOutput run_normal_gibbs(const AnalysisSpec& spec) {
  const std::string m = spec.model;
  const NormalSummary s(need(spec.n, "n", m), need(spec.xbar, "xbar", m), need(spec.sd, "sd", m));
  const IntervalHypothesis hyp = make_hypothesis(spec, 0.0);
  const GpdSpec gpd = make_gpd(spec, hyp);
  normal_gibbs::GibbsOptions o;
  o.n_samples = spec.samples.value_or(500'000);
  o.burn_in = spec.burn_in;
  o.scan = normal_gibbs::parse_scan_order(spec.scan);
  o.seed = resolve_seed(spec.seed);
  detail::require(o.n_samples >= 2, "mc: samples must be at least 2");
  const normal_gibbs::ChainOutput chain = normal_gibbs::gibbs_run(s, hyp, gpd, o);

  AnalysisOutput out;
  auto& rec = out.record;
  rec["model"] = m;
  rec["p_in"] = chain.probability_mu_in(hyp.lo, hyp.hi);
  rec["p_out"] = 1.0 - rec["p_in"].get<double>();
  rec["samples"] = chain.size();
  rec["burn_in"] = chain.burn_in;
  rec["scan"] = normal_gibbs::to_string(chain.scan);
  rec["seed"] = chain.seed;
  rec["mean_mu"] = numerics::mean(chain.mu);
  rec["mean_sigma"] = numerics::mean(chain.sigma);
  rec["corr_mu_sigma"] = numerics::pearson(chain.mu, chain.sigma);

  const std::vector<double> ones(chain.size(), 1.0);
  CsvTable t = histogram_table();
  for (const auto& [label, values] : {std::pair{"mu", &chain.mu}, std::pair{"sigma", &chain.sigma}}) {
    const DensityHandle h = numerics::weighted_histogram(*values, ones);
    add_histogram(t, *h.as_histogram(), 1.0, label);
  }
  out.tables.emplace_back("histogram", std::move(t));
  return out;
}

AnalysisOutput run_binomial(const AnalysisSpec& spec) {
  const std::string m = spec.model;
  const BinomialCount c(need(spec.x, "x", m), need(spec.n, "n", m));
  const IntervalHypothesis hyp = make_hypothesis(spec, 0.5);
  const McOptions o = mc_options(spec, 2'000'000);
  const PostDataResult r = binomial::analyze(c, hyp, make_gpd(spec, hyp), o);

  AnalysisOutput out;
  out.record = base_record(m, r);
  out.record["mc_stderr"] = optional_number(r.mc_stderr);
  out.record["ess"] = optional_number(r.ess);
  out.record["samples"] = o.samples;
  out.record["seed"] = o.seed;
  CsvTable t = histogram_table();
  add_mixture_histogram(t, r, "post_data");
  out.tables.emplace_back("histogram", std::move(t));
  return out;
}

AnalysisOutput run_relative_risk(const AnalysisSpec& spec) {
  const std::string m = spec.model;
  const TwoArmCounts c(need(spec.e_t, "e_t", m), need(spec.n_t, "n_t", m), need(spec.e_c, "e_c", m),
                       need(spec.n_c, "n_c", m));
  if (spec.lo || spec.hi || spec.center) {
    throw ValidationError("relative-risk: the interval is [1/(1+eps), 1+eps]; give eps only");
  }
  if (spec.gpd && *spec.gpd != "smoothed") {
    throw ValidationError("relative-risk: only the smoothed GPD is supported");
  }
  if (spec.tau) throw ValidationError("relative-risk: tau is always solved for continuity");
  const relative_risk::RatioHypothesis hyp(need(spec.eps, "eps", m), spec.prior.value_or(0.5));
  const relative_risk::BumpShape shape{spec.bump_alpha, spec.bump_beta};
  const McOptions o = mc_options(spec, 4'000'000);
  const relative_risk::RelativeRiskResult r = spec.jeffreys
                                                  ? relative_risk::jeffreys_approx(c, hyp, shape, o)
                                                  : relative_risk::analyze(c, hyp, shape, o);

  AnalysisOutput out;
  out.record = base_record(m, r.ratio);
  out.record["method"] = spec.jeffreys ? "jeffreys" : "fiducial";
  out.record["mc_stderr"] = optional_number(r.ratio.mc_stderr);
  out.record["ess"] = optional_number(r.ratio.ess);
  out.record["n_inside"] = r.n_inside;
  out.record["jump_lo"] = r.continuity.at_lo;
  out.record["jump_hi"] = r.continuity.at_hi;
  out.record["samples"] = o.samples;
  out.record["seed"] = o.seed;
  CsvTable t = histogram_table();
  add_mixture_histogram(t, r.ratio, "ratio");
  add_histogram(t, *r.pi_t.as_histogram(), 1.0, "pi_t");
  add_histogram(t, *r.pi_c.as_histogram(), 1.0, "pi_c");
  out.tables.emplace_back("histogram", std::move(t));
  return out;
}

}  // namespace

AnalysisSpec parse_spec_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec: malformed JSON: ") + e.what());
  }
  AnalysisSpec spec;
  try {
    check_keys(doc, {"schema", "model", "data", "hypothesis", "gpd", "mc", "output"}, "spec");
    if (!doc.contains("schema") || doc.at("schema") != 1) {
      throw ValidationError("spec: expected \"schema\": 1");
    }
    spec.model = doc.at("model").get<std::string>();
    if (doc.contains("data")) {
      const json& d = doc.at("data");
      check_keys(d, {"n", "x", "xbar", "sd", "sigma", "se", "e_t", "n_t", "e_c", "n_c"}, "data");
      read(d, "n", spec.n);
      read(d, "x", spec.x);
      read(d, "xbar", spec.xbar);
      read(d, "sd", spec.sd);
      read(d, "sigma", spec.sd);
      read(d, "se", spec.se);
      read(d, "e_t", spec.e_t);
      read(d, "n_t", spec.n_t);
      read(d, "e_c", spec.e_c);
      read(d, "n_c", spec.n_c);
    }
    if (doc.contains("hypothesis")) {
      const json& h = doc.at("hypothesis");
      check_keys(h, {"eps", "center", "lo", "hi", "prior"}, "hypothesis");
      read(h, "eps", spec.eps);
      read(h, "center", spec.center);
      read(h, "lo", spec.lo);
      read(h, "hi", spec.hi);
      read(h, "prior", spec.prior);
    }
    if (doc.contains("gpd")) {
      const json& g = doc.at("gpd");
      if (g.is_string()) {
        spec.gpd = g.get<std::string>();
      } else {
        check_keys(g, {"type", "bump", "tau"}, "gpd");
        spec.gpd = g.at("type").get<std::string>();
        if (g.contains("bump")) {
          const auto ab = g.at("bump").get<std::vector<double>>();
          if (ab.size() != 2) throw ValidationError("spec: gpd.bump must be [alpha, beta]");
          spec.bump_alpha = ab[0];
          spec.bump_beta = ab[1];
        }
        read(g, "tau", spec.tau);
      }
    }
    if (doc.contains("mc")) {
      const json& mc = doc.at("mc");
      check_keys(mc, {"samples", "burn_in", "seed", "scan", "threads", "jeffreys"}, "mc");
      read(mc, "samples", spec.samples);
      read(mc, "burn_in", spec.burn_in);
      read(mc, "seed", spec.seed);
      read(mc, "scan", spec.scan);
      read(mc, "threads", spec.threads);
      read(mc, "jeffreys", spec.jeffreys);
    }
    if (doc.contains("output")) {
      const json& o = doc.at("output");
      check_keys(o, {"path", "format"}, "output");
      if (o.contains("path")) spec.out = o.at("path").get<std::string>();
      read(o, "format", spec.format);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("spec: ") + e.what());
  }
  return spec;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("SHARPFID_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') {
      throw ValidationError(std::string("SHARPFID_SEED is not a non-negative integer: ") + env);
    }
    return v;
  }
  return 1;
}

AnalysisOutput run_analysis(const AnalysisSpec& spec) {
  if (spec.format != "csv" && spec.format != "json") {
    throw ValidationError("format must be csv or json, got '" + spec.format + "'");
  }
  if (spec.model == "normal-known") return run_normal_known(spec);
  if (spec.model == "normal-direct") return run_normal_direct(spec);
  if (spec.model == "normal-gibbs") return run_normal_gibbs(spec);
  if (spec.model == "binomial") return run_binomial(spec);
  if (spec.model == "relative-risk") return run_relative_risk(spec);
  throw ValidationError("unknown model '" + spec.model + "'");
}

void emit(const AnalysisSpec& spec, const AnalysisOutput& output, std::ostream& out) {
  const std::string record =
      spec.format == "json" ? output.record.dump(2) + "\n" : record_to_csv(output.record);
  out << record;
  if (!spec.out) return;
  write_atomic(*spec.out / ("result." + spec.format), record);
  for (const auto& [stem, table] : output.tables) write_atomic(*spec.out / (stem + ".csv"), table.str());
}

CsvTable curve_table() { return CsvTable({"x", "density", "curve"}); }
CsvTable histogram_table() { return CsvTable({"bin_lo", "bin_hi", "density", "curve"}); }

void add_curve(CsvTable& table, const DensityHandle& density, const std::vector<double>& grid,
               const std::string& label) {
  for (double x : grid) table.add_row({format_number(x), format_number(density.pdf(x)), label});
}

void add_histogram(CsvTable& table, const Histogram& histogram, double scale,
                   const std::string& label) {
  for (std::size_t i = 0; i < histogram.bins(); ++i) {
    table.add_row({format_number(histogram.edges[i]), format_number(histogram.edges[i + 1]),
                   format_number(scale * histogram.densities[i]), label});
  }
}

void add_mixture_histogram(CsvTable& table, const PostDataResult& result,
                           const std::string& label) {
  const Histogram* in = result.density_in.as_histogram();
  const Histogram* out = result.density_out.as_histogram();
  if (!in || !out) throw std::logic_error("add_mixture_histogram: components are not histograms");
  const double lo = in->edges.front();
  const double hi = in->edges.back();
  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < out->bins(); ++i) {
    if (out->edges[i] >= lo && out->edges[i + 1] <= hi) continue;
    rows.push_back({out->edges[i], out->edges[i + 1], result.p_out * out->densities[i]});
  }
  for (std::size_t i = 0; i < in->bins(); ++i) {
    rows.push_back({in->edges[i], in->edges[i + 1], result.p_in * in->densities[i]});
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& r : rows) {
    table.add_row({format_number(r[0]), format_number(r[1]), format_number(r[2]), label});
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

}  // namespace sharpfid::cli
