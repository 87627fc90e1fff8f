#include "cli/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include <json.hpp>

#include "cli/analysis.hpp"
#include "cli/output.hpp"
#include "sharpfid/models/binomial.hpp"
#include "sharpfid/models/normal_direct.hpp"
#include "sharpfid/models/normal_gibbs.hpp"
#include "sharpfid/models/normal_known.hpp"
#include "sharpfid/models/relative_risk.hpp"
#include "sharpfid/numerics/stats.hpp"

namespace sharpfid::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kXbarStep = 0.025;
constexpr int kXbarSteps = 200;

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class FigureWriter {
 public:
  FigureWriter(int id, const FigureOptions& options) : id_(id), options_(options) {
    meta_["figure"] = id;
    meta_["seed"] = options.seed;
    meta_["paper_scale"] = options.paper_scale;
  }

  ordered_json& meta() { return meta_; }

  void write(const std::string& name, const CsvTable& table) {
    const fs::path p = options_.out_dir / ("fig" + std::to_string(id_) + name + ".csv");
    write_atomic(p, table.str());
    meta_["files"].push_back(p.filename().string());
    written_.push_back(p);
  }

  std::vector<fs::path> finish() {
    const fs::path p = options_.out_dir / ("fig" + std::to_string(id_) + "_meta.json");
    write_atomic(p, meta_.dump(2) + "\n");
    written_.push_back(p);
    return written_;
  }

 private:
  int id_;
  FigureOptions options_;
  ordered_json meta_;
  std::vector<fs::path> written_;
};

CsvTable probability_table() { return CsvTable({"xbar", "probability", "curve"}); }

void probability_curves(FigureWriter& w, const std::vector<double>& eps_values,
                        const std::function<double(double xbar, double eps, double prior)>& f) {
  for (double eps : eps_values) {
    for (double prior : {0.3, 0.5}) {
      const std::string label = "eps=" + tag(eps) + ",prior=" + tag(prior);
      CsvTable t = probability_table();
      for (double xbar : xbar_grid()) {
        t.add_row({format_number(xbar), format_number(f(xbar, eps, prior)), label});
      }
      w.write("_eps" + tag(eps) + "_prior" + tag(prior), t);
    }
  }
  w.meta()["xbar_grid"] = {{"from", 0.0}, {"to", 5.0}, {"step", kXbarStep}};
}

std::vector<double> mu_grid(const IntervalHypothesis& hyp) {
  std::vector<double> g = linspace(-3.0, 7.0, 2001);
  g.push_back(hyp.lo);
  g.push_back(hyp.hi);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

void density_curves(FigureWriter& w, const IntervalHypothesis& hyp,
                    const std::function<DensityHandle(double xbar)>& density) {
  for (double xbar : {1.7, 2.1, 2.5}) {
    CsvTable t = curve_table();
    add_curve(t, density(xbar), mu_grid(hyp), "xbar=" + tag(xbar));
    w.write("_xbar" + tag(xbar), t);
  }
  w.meta()["mu_grid"] = {{"from", -3.0}, {"to", 7.0}, {"points", 2001},
                         {"plus", {hyp.lo, hyp.hi}}};
}

GpdSpec smoothed_gpd(const IntervalHypothesis& hyp) {
  return GpdSpec::smoothed(BumpDensity::beta_on_interval(4.0, 4.0, hyp.lo, hyp.hi));
}

std::vector<fs::path> figure1(const FigureOptions& o) {
  FigureWriter w(1, o);
  w.meta()["description"] = "P(mu in [-eps, eps] | x), normal mean, se = 1";
  probability_curves(w, {0.0, 0.25, 0.5}, [](double xbar, double eps, double prior) {
    return normal_known::analyze(NormalKnownSummary::from_se(xbar, 1.0),
                                 IntervalHypothesis::symmetric(0.0, eps, prior), GpdSpec::flat())
        .p_in;
  });
  return w.finish();
}

std::vector<fs::path> figure2(const FigureOptions& o) {
  FigureWriter w(2, o);
  w.meta()["description"] = "post-data density of mu, eps = 0.1, prior 0.3, se = 1";
  const auto hyp = IntervalHypothesis::symmetric(0.0, 0.1, 0.3);
  density_curves(w, hyp, [&](double xbar) {
    return normal_known::analyze(NormalKnownSummary::from_se(xbar, 1.0), hyp, GpdSpec::flat())
        .mixture();
  });
  return w.finish();
}

std::vector<fs::path> figure3(const FigureOptions& o) {
  FigureWriter w(3, o);
  w.meta()["description"] = "P(mu in [-0.2, 0.2] | x) under eps = 0, 0.1, 0.2, se = 1";
  probability_curves(w, {0.0, 0.1, 0.2}, [](double xbar, double eps, double prior) {
    return normal_known::analyze(NormalKnownSummary::from_se(xbar, 1.0),
                                 IntervalHypothesis::symmetric(0.0, eps, prior), GpdSpec::flat())
        .probability_of(-0.2, 0.2);
  });
  return w.finish();
}

std::vector<fs::path> figure4(const FigureOptions& o) {
  FigureWriter w(4, o);
  McOptions mc;
  mc.samples = o.paper_scale ? 2'000'000 : 200'000;
  mc.seed = o.seed;
  mc.threads = o.threads;
  w.meta()["description"] = "post-data histograms of a binomial proportion, n = 16, eps = 0.01, prior 0.3";
  w.meta()["samples"] = mc.samples;
  const auto hyp = IntervalHypothesis::symmetric(0.5, 0.01, 0.3);
  for (int x : {5, 4, 3}) {
    const PostDataResult r = binomial::analyze(BinomialCount(x, 16), hyp, GpdSpec::flat(), mc);
    CsvTable t = histogram_table();
    add_mixture_histogram(t, r, "x=" + std::to_string(x));
    w.write("_x" + std::to_string(x), t);
    w.meta()["p_in"]["x=" + std::to_string(x)] = r.p_in;
  }
  return w.finish();
}

std::vector<fs::path> figure5(const FigureOptions& o) {
  FigureWriter w(5, o);
  w.meta()["description"] = "smoothed post-data density of mu, eps = 0.2, prior 0.33, se = 1";
  const auto hyp = IntervalHypothesis::symmetric(0.0, 0.2, 0.33);
  density_curves(w, hyp, [&](double xbar) {
    return normal_known::analyze(NormalKnownSummary::from_se(xbar, 1.0), hyp, smoothed_gpd(hyp))
        .mixture();
  });
  return w.finish();
}

std::vector<fs::path> figure6(const FigureOptions& o) {
  FigureWriter w(6, o);
  const NormalSummary s(9, 2.1, 3.0);
  const auto hyp = IntervalHypothesis::symmetric(0.0, 0.2, 0.33);
  normal_gibbs::GibbsOptions g;
  g.n_samples = o.paper_scale ? 5'000'000 : 500'000;
  g.burn_in = 1000;
  g.scan = normal_gibbs::ScanOrder::uniform_random;
  g.seed = o.seed;
  const auto chain = normal_gibbs::gibbs_run(s, hyp, smoothed_gpd(hyp), g);
  w.meta()["description"] = "Gibbs marginals of mu and sigma, n = 9, xbar = 2.1, s = 3, eps = 0.2, prior 0.33, random scan";
  w.meta()["samples"] = g.n_samples;
  w.meta()["burn_in"] = g.burn_in;
  w.meta()["p_in"] = chain.probability_mu_in(hyp.lo, hyp.hi);

  const std::vector<double> ones(chain.size(), 1.0);
  const normal_direct::JointFiducialNormal fid(s);
  const numerics::HistogramOptions mu_range{400, -4.0, 8.0};
  const numerics::HistogramOptions sigma_range{400, 0.0, 12.0};
  {
    CsvTable t = histogram_table();
    add_histogram(t, *numerics::weighted_histogram(chain.mu, ones, mu_range).as_histogram(),
                  chain.probability_mu_in(-4.0, 8.0), "gibbs");
    w.write("a_mu_histogram", t);
    CsvTable c = curve_table();
    for (double mu : linspace(-4.0, 8.0, 1201)) {
      c.add_row({format_number(mu), format_number(fid.mu_marginal_pdf(mu)), "fiducial"});
    }
    w.write("a_mu_fiducial", c);
  }
  {
    std::size_t kept = 0;
    for (double v : chain.sigma) kept += v <= 12.0;
    CsvTable t = histogram_table();
    add_histogram(t, *numerics::weighted_histogram(chain.sigma, ones, sigma_range).as_histogram(),
                  static_cast<double>(kept) / static_cast<double>(chain.size()), "gibbs");
    w.write("b_sigma_histogram", t);
    CsvTable c = curve_table();
    for (double sg : linspace(0.0, 12.0, 1201)) {
      c.add_row({format_number(sg), format_number(sg > 0 ? fid.sigma_marginal_pdf(sg) : 0.0),
                 "fiducial"});
    }
    w.write("b_sigma_fiducial", c);
  }
  return w.finish();
}

std::vector<fs::path> figure7(const FigureOptions& o) {
  FigureWriter w(7, o);
  w.meta()["description"] = "P(mu in [-eps, eps] | x), sigma unknown, n = 9, s = 3";
  probability_curves(w, {0.0, 0.25, 0.5}, [](double xbar, double eps, double prior) {
    return normal_direct::post_prob_direct(NormalSummary(9, xbar, 3.0),
                                           IntervalHypothesis::symmetric(0.0, eps, prior),
                                           GpdSpec::flat())
        .p_in;
  });
  return w.finish();
}

std::vector<fs::path> figure8(const FigureOptions& o) {
  FigureWriter w(8, o);
  w.meta()["description"] = "marginal post-data densities of mu and sigma, direct route, n = 9, s = 3, eps = 0.2, prior 0.33";
  const auto hyp = IntervalHypothesis::symmetric(0.0, 0.2, 0.33);
  const std::vector<double> sigma_grid = linspace(0.05, 12.0, 240);
  for (double xbar : {1.7, 2.1, 2.5}) {
    const NormalSummary s(9, xbar, 3.0);
    const auto joint = normal_direct::joint_post_density(s, hyp, smoothed_gpd(hyp));
    CsvTable a = curve_table();
    add_curve(a, joint.mu_marginal(), mu_grid(hyp), "xbar=" + tag(xbar));
    w.write("a_xbar" + tag(xbar), a);
    CsvTable b = curve_table();
    for (double sg : sigma_grid) {
      b.add_row({format_number(sg), format_number(joint.sigma_marginal_pdf(sg)),
                 "xbar=" + tag(xbar)});
    }
    w.write("b_xbar" + tag(xbar), b);
    w.meta()["p_in"]["xbar=" + tag(xbar)] = joint.result().p_in;
  }
  const normal_direct::JointFiducialNormal fid(NormalSummary(9, 2.1, 3.0));
  CsvTable f = curve_table();
  for (double sg : sigma_grid) {
    f.add_row({format_number(sg), format_number(fid.sigma_marginal_pdf(sg)), "fiducial"});
  }
  w.write("b_fiducial", f);
  w.meta()["mu_grid"] = {{"from", -3.0}, {"to", 7.0}, {"points", 2001}};
  w.meta()["sigma_grid"] = {{"from", 0.05}, {"to", 12.0}, {"points", 240}};
  return w.finish();
}

std::vector<fs::path> figure9(const FigureOptions& o) {
  FigureWriter w(9, o);
  McOptions mc;
  mc.samples = o.paper_scale ? 4'000'000 : 400'000;
  mc.seed = o.seed;
  mc.threads = o.threads;
  const relative_risk::RatioHypothesis hyp(0.045, 0.4);
  w.meta()["description"] = "marginals of pi_t, pi_c and pi_t / pi_c, n_t = 20, e_c = 18, n_c = 30, eps = 0.045, prior 0.4";
  w.meta()["samples"] = mc.samples;

  auto emit_three = [&](const relative_risk::RelativeRiskResult& r, const std::string& suffix,
                        const std::string& label) {
    CsvTable a = histogram_table();
    add_histogram(a, *r.pi_t.as_histogram(), 1.0, label);
    w.write("a_pi_t_" + suffix, a);
    CsvTable b = histogram_table();
    add_histogram(b, *r.pi_c.as_histogram(), 1.0, label);
    w.write("b_pi_c_" + suffix, b);
    CsvTable c = histogram_table();
    add_mixture_histogram(c, r.ratio, label);
    w.write("c_ratio_" + suffix, c);
  };

  const auto fid = relative_risk::analyze(TwoArmCounts(6, 20, 18, 30), hyp, {}, mc);
  emit_three(fid, "histogram_et6", "fiducial,e_t=6");
  w.meta()["p_in"]["fiducial,e_t=6"] = fid.ratio.p_in;
  for (int et : {5, 6, 7}) {
    const auto jr = relative_risk::jeffreys_approx(TwoArmCounts(et, 20, 18, 30), hyp, {}, mc);
    const std::string label = "jeffreys,e_t=" + std::to_string(et);
    emit_three(jr, "jeffreys_et" + std::to_string(et), label);
    w.meta()["p_in"][label] = jr.ratio.p_in;
  }
  return w.finish();
}

}  // namespace

std::vector<double> xbar_grid() {
  std::vector<double> g(kXbarSteps + 1);
  for (int i = 0; i <= kXbarSteps; ++i) g[i] = i * kXbarStep;
  return g;
}

std::vector<fs::path> write_figure(int id, const FigureOptions& options) {
  switch (id) {
    case 1: return figure1(options);
    case 2: return figure2(options);
    case 3: return figure3(options);
    case 4: return figure4(options);
    case 5: return figure5(options);
    case 6: return figure6(options);
    case 7: return figure7(options);
    case 8: return figure8(options);
    case 9: return figure9(options);
    default:
      throw ValidationError("figure id must be between 1 and 9, got " + std::to_string(id));
  }
}

}  // namespace sharpfid::cli
