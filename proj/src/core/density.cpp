#include "sharpfid/core/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "sharpfid/error.hpp"
#include "sharpfid/numerics/quadrature.hpp"
#include "sharpfid/numerics/roots.hpp"

namespace sharpfid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ContinuousPart {
  ContinuousDensity density;
};
struct AtomPart {
  double location;
};
struct HistogramPart {
  Histogram histogram;
  std::vector<double> cumulative;  // mass below each edge
};
struct MixturePart {
  double p_in;
  DensityHandle inside;
  DensityHandle outside;
};
struct EmptyPart {};

double continuous_mass(const ContinuousDensity& d, double a, double b) {
  if (!(a < b)) return 0.0;
  if (d.mass) return d.mass(a, b);
  double total = 0.0;
  for (const Interval& s : d.support) {
    const double lo = std::max(a, s.lo);
    const double hi = std::min(b, s.hi);
    if (lo < hi) total += numerics::integrate(d.pdf, lo, hi);
  }
  return total;
}

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> out;
  for (const Interval& s : v) {
    if (!out.empty() && s.lo <= out.back().hi && s.length() > 0.0 && out.back().length() > 0.0) {
      out.back().hi = std::max(out.back().hi, s.hi);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

struct DensityHandle::Impl {
  std::variant<EmptyPart, ContinuousPart, AtomPart, HistogramPart, MixturePart> part;
};

DensityHandle DensityHandle::continuous(ContinuousDensity density) {
  detail::require(static_cast<bool>(density.pdf), "DensityHandle: continuous density needs a pdf");
  detail::require(!density.support.empty(), "DensityHandle: continuous density needs a support");
  return DensityHandle(std::make_shared<const Impl>(Impl{ContinuousPart{std::move(density)}}));
}

DensityHandle DensityHandle::atom(double location) {
  detail::require(std::isfinite(location), "DensityHandle: atom location must be finite");
  return DensityHandle(std::make_shared<const Impl>(Impl{AtomPart{location}}));
}

DensityHandle DensityHandle::histogram(Histogram h) {
  detail::require(h.bins() >= 1 && h.edges.size() == h.bins() + 1,
                  "DensityHandle: histogram edges and densities disagree");
  std::vector<double> cum(h.edges.size(), 0.0);
  for (std::size_t i = 0; i < h.bins(); ++i) {
    detail::require(h.edges[i + 1] > h.edges[i], "DensityHandle: histogram edges not increasing");
    detail::require(h.densities[i] >= 0.0, "DensityHandle: negative histogram density");
    cum[i + 1] = cum[i] + h.densities[i] * h.width(i);
  }
  return DensityHandle(
      std::make_shared<const Impl>(Impl{HistogramPart{std::move(h), std::move(cum)}}));
}

DensityHandle DensityHandle::empty() {
  static const auto impl = std::make_shared<const Impl>(Impl{EmptyPart{}});
  return DensityHandle(impl);
}

DensityHandle DensityHandle::mixture_unchecked(double p_in, DensityHandle inside,
                                               DensityHandle outside) {
  detail::require(p_in >= 0.0 && p_in <= 1.0, "DensityHandle: mixture weight outside [0, 1]");
  return DensityHandle(std::make_shared<const Impl>(
      Impl{MixturePart{p_in, std::move(inside), std::move(outside)}}));
}

bool DensityHandle::is_empty() const { return std::holds_alternative<EmptyPart>(impl_->part); }
bool DensityHandle::is_atom() const { return std::holds_alternative<AtomPart>(impl_->part); }
bool DensityHandle::is_histogram() const {
  return std::holds_alternative<HistogramPart>(impl_->part);
}
bool DensityHandle::is_mixture() const { return std::holds_alternative<MixturePart>(impl_->part); }

double DensityHandle::pdf(double x) const {
  struct Visitor {
    double x;
    double operator()(const EmptyPart&) const { return 0.0; }
    double operator()(const ContinuousPart& c) const {
      for (const Interval& s : c.density.support) {
        if (x >= s.lo && x <= s.hi) return c.density.pdf(x);
      }
      return 0.0;
    }
    double operator()(const AtomPart&) const { return 0.0; }
    double operator()(const HistogramPart& h) const {
      const auto& e = h.histogram.edges;
      if (x < e.front() || x > e.back()) return 0.0;
      auto it = std::upper_bound(e.begin(), e.end(), x);
      std::size_t k = static_cast<std::size_t>(it - e.begin());
      k = k == 0 ? 0 : std::min(k - 1, h.histogram.bins() - 1);
      return h.histogram.densities[k];
    }
    double operator()(const MixturePart& m) const {
      double out = 0.0;
      if (m.p_in > 0.0) out += m.p_in * m.inside.pdf(x);
      if (m.p_in < 1.0) out += (1.0 - m.p_in) * m.outside.pdf(x);
      return out;
    }
  };
  return std::visit(Visitor{x}, impl_->part);
}

double DensityHandle::atom_mass() const {
  if (is_atom()) return 1.0;
  if (const auto* m = std::get_if<MixturePart>(&impl_->part)) {
    return m->p_in * m->inside.atom_mass() + (1.0 - m->p_in) * m->outside.atom_mass();
  }
  return 0.0;
}

std::optional<double> DensityHandle::atom_location() const {
  if (const auto* a = std::get_if<AtomPart>(&impl_->part)) return a->location;
  if (const auto* m = std::get_if<MixturePart>(&impl_->part)) {
    if (auto loc = m->inside.atom_location()) return loc;
    return m->outside.atom_location();
  }
  return std::nullopt;
}

double DensityHandle::mass(double a, double b) const {
  struct Visitor {
    double a;
    double b;
    double operator()(const EmptyPart&) const { return 0.0; }
    double operator()(const ContinuousPart& c) const { return continuous_mass(c.density, a, b); }
    double operator()(const AtomPart& p) const {
      return p.location >= a && p.location <= b ? 1.0 : 0.0;
    }
    double operator()(const HistogramPart& h) const {
      const auto& e = h.histogram.edges;
      auto below = [&](double x) {
        if (x <= e.front()) return 0.0;
        if (x >= e.back()) return h.cumulative.back();
        auto it = std::upper_bound(e.begin(), e.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - e.begin()) - 1;
        return h.cumulative[k] + h.histogram.densities[k] * (x - e[k]);
      };
      return a < b ? below(b) - below(a) : 0.0;
    }
    double operator()(const MixturePart& m) const {
      double out = 0.0;
      if (m.p_in > 0.0) out += m.p_in * m.inside.mass(a, b);
      if (m.p_in < 1.0) out += (1.0 - m.p_in) * m.outside.mass(a, b);
      return out;
    }
  };
  if (a > b) return 0.0;
  return std::visit(Visitor{a, b}, impl_->part);
}

double DensityHandle::cdf(double x) const { return mass(-kInf, x); }

double DensityHandle::sample(numerics::RngStream& rng) const {
  struct Visitor {
    numerics::RngStream& rng;
    double operator()(const EmptyPart&) const {
      throw ZeroMass("DensityHandle: cannot sample the empty measure");
    }
    double operator()(const ContinuousPart& c) const {
      if (c.density.sampler) return c.density.sampler(rng);
      // Pick a support piece by mass, then invert within it.
      std::vector<double> masses;
      double total = 0.0;
      for (const Interval& s : c.density.support) {
        masses.push_back(continuous_mass(c.density, s.lo, s.hi));
        total += masses.back();
      }
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < masses.size(); ++i) {
        if (u <= masses[i] || i + 1 == masses.size()) {
          const Interval& s = c.density.support[i];
          return sample_by_inversion(c.density.pdf, s.lo, s.hi, masses[i], rng);
        }
        u -= masses[i];
      }
      throw ZeroMass("DensityHandle: zero mass");
    }
    double operator()(const AtomPart& p) const { return p.location; }
    double operator()(const HistogramPart& h) const {
      const double u = rng.uniform() * h.cumulative.back();
      auto it = std::upper_bound(h.cumulative.begin(), h.cumulative.end(), u);
      std::size_t k = static_cast<std::size_t>(it - h.cumulative.begin());
      k = std::clamp<std::size_t>(k, 1, h.histogram.bins()) - 1;
      const double frac = (u - h.cumulative[k]) / (h.cumulative[k + 1] - h.cumulative[k]);
      return h.histogram.edges[k] + std::clamp(frac, 0.0, 1.0) * h.histogram.width(k);
    }
    double operator()(const MixturePart& m) const {
      return rng.uniform() < m.p_in ? m.inside.sample(rng) : m.outside.sample(rng);
    }
  };
  return std::visit(Visitor{rng}, impl_->part);
}

std::vector<Interval> DensityHandle::support() const {
  struct Visitor {
    std::vector<Interval> operator()(const EmptyPart&) const { return {}; }
    std::vector<Interval> operator()(const ContinuousPart& c) const {
      return merge(c.density.support);
    }
    std::vector<Interval> operator()(const AtomPart& p) const {
      return {{p.location, p.location}};
    }
    std::vector<Interval> operator()(const HistogramPart& h) const {
      std::vector<Interval> out;
      for (std::size_t i = 0; i < h.histogram.bins(); ++i) {
        if (h.histogram.densities[i] > 0.0) {
          out.push_back({h.histogram.edges[i], h.histogram.edges[i + 1]});
        }
      }
      return merge(out);
    }
    std::vector<Interval> operator()(const MixturePart& m) const {
      std::vector<Interval> out;
      if (m.p_in > 0.0) out = m.inside.support();
      if (m.p_in < 1.0) {
        auto more = m.outside.support();
        out.insert(out.end(), more.begin(), more.end());
      }
      return merge(out);
    }
  };
  return std::visit(Visitor{}, impl_->part);
}

const Histogram* DensityHandle::as_histogram() const {
  if (const auto* h = std::get_if<HistogramPart>(&impl_->part)) return &h->histogram;
  return nullptr;
}

double DensityHandle::mixture_weight() const {
  if (const auto* m = std::get_if<MixturePart>(&impl_->part)) return m->p_in;
  throw ValidationError("DensityHandle: not a mixture");
}

const DensityHandle* DensityHandle::mixture_inside() const {
  if (const auto* m = std::get_if<MixturePart>(&impl_->part)) return &m->inside;
  return nullptr;
}

const DensityHandle* DensityHandle::mixture_outside() const {
  if (const auto* m = std::get_if<MixturePart>(&impl_->part)) return &m->outside;
  return nullptr;
}

double sample_by_inversion(const std::function<double(double)>& pdf, double lo, double hi,
                           double total_mass, numerics::RngStream& rng) {
  detail::require(std::isfinite(lo) && std::isfinite(hi),
                  "sample_by_inversion: needs a finite interval");
  if (!(total_mass > 0.0)) throw ZeroMass("sample_by_inversion: zero mass");
  const double target = rng.uniform() * total_mass;
  // Bracket on a coarse cumulative table, then bisect inside one cell.
  constexpr int kCells = 64;
  const double step = (hi - lo) / kCells;
  double cum = 0.0;
  int cell = kCells - 1;
  for (int i = 0; i < kCells; ++i) {
    const double m = numerics::integrate(pdf, lo + i * step, lo + (i + 1) * step);
    if (cum + m >= target) {
      cell = i;
      break;
    }
    cum += m;
  }
  const double a = lo + cell * step;
  const double b = cell + 1 == kCells ? hi : a + step;
  const double rest = target - cum;
  return numerics::bisect([&](double x) { return numerics::integrate(pdf, a, x) - rest; },
                          {a, b}, 1e-12 * std::max(1.0, std::abs(b)));
}

double overlap_length(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double total = 0.0;
  for (const Interval& x : a) {
    for (const Interval& y : b) {
      const double lo = std::max(x.lo, y.lo);
      const double hi = std::min(x.hi, y.hi);
      if (hi > lo) total += std::isinf(hi - lo) ? kInf : hi - lo;
    }
  }
  return total;
}

}  // namespace sharpfid
