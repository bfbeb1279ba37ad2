#include "upbwit/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace upbwit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Maximizes f on [lo, hi]; NaN values count as -inf.
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto value = [&](double x) {
    const double v = f(x);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  while (hi - lo > tol) {
    if (f1 >= f2) {  // ties move toward the lower end
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = value(x2);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

}  // namespace

std::string to_string(Classification c) {
  return c == Classification::Entangled ? "entangled" : "inconclusive";
}

double DecayFit::sqrt_a() const { return std::sqrt(std::max(a, 0.0)); }

Classification classify(double a) {
  return a > kEntanglementThreshold ? Classification::Entangled
                                    : Classification::Inconclusive;
}

Classification classify(const DecayFit& fit) { return classify(fit.a); }

double decay_correlation(std::span<const double> x, std::span<const double> y, double a,
                         double b) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  std::vector<double> ty(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = y[i] - a;
    if (!(gap > 0.0)) return kNaN;
    ty[i] = std::pow(std::abs(std::log(gap)), b);
    sx += x[i];
    sy += ty[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = ty[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return std::abs(sxy / std::sqrt(sxx * syy));
}

DecayFit fit_decay(const GilbertTrace& trace, const DecayFitOptions& opts) {
  const auto& pts = trace.points;
  if (pts.size() < 10) {
    throw std::invalid_argument("fit_decay: need at least 10 trace points, got " +
                                std::to_string(pts.size()));
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && pts[i].squared_distance > pts[i - 1].squared_distance) {
      throw std::invalid_argument("fit_decay: trace is not monotone at correction " +
                                  std::to_string(pts[i].correction));
    }
    if (!(pts[i].squared_distance > 0.0)) {
      throw std::invalid_argument("fit_decay: squared distances must be positive");
    }
    if (!ys.empty() && pts[i].squared_distance == ys.back()) continue;
    xs.push_back(static_cast<double>(pts[i].correction));
    ys.push_back(pts[i].squared_distance);
  }
  if (xs.size() < 10) {
    throw std::invalid_argument("fit_decay: fewer than 10 distinct trace points");
  }
  const auto skip = static_cast<std::size_t>(std::floor(opts.transient_fraction * xs.size()));
  const std::span<const double> x(xs.data() + skip, xs.size() - skip);
  const std::span<const double> y(ys.data() + skip, ys.size() - skip);

  const double a_hi = opts.a_fraction * ys.back();
  auto corr = [&](double a, double b) { return decay_correlation(x, y, a, b); };

  DecayFit best;
  best.r = -1.0;
  const double da = a_hi / (opts.grid_a - 1);
  const double db = (opts.b_max - opts.b_min) / (opts.grid_b - 1);
  for (int i = 0; i < opts.grid_a; ++i) {
    const double a = da * i;
    for (int j = 0; j < opts.grid_b; ++j) {
      const double b = opts.b_min + db * j;
      const double r = corr(a, b);
      if (!std::isnan(r) && r > best.r) {
        best.a = a;
        best.b = b;
        best.r = r;
      }
    }
  }
  if (best.r < 0.0) {
    throw std::invalid_argument("fit_decay: no admissible (a, b) on the search grid");
  }

  for (int round = 0; round < opts.refine_rounds; ++round) {
    const double a_lo = std::max(0.0, best.a - da);
    const double a_up = std::min(a_hi, best.a + da);
    const double a = golden_max([&](double v) { return corr(v, best.b); }, a_lo, a_up,
                                opts.a_resolution);
    const double ra = corr(a, best.b);
    if (!std::isnan(ra) && ra > best.r) {
      best.a = a;
      best.r = ra;
    }
    const double b_lo = std::max(opts.b_min, best.b - db);
    const double b_up = std::min(opts.b_max, best.b + db);
    const double b = golden_max([&](double v) { return corr(best.a, v); }, b_lo, b_up, 1e-9);
    const double rb = corr(best.a, b);
    if (!std::isnan(rb) && rb > best.r) {
      best.b = b;
      best.r = rb;
    }
  }
  best.points_used = static_cast<int>(x.size());
  best.classification = classify(best.a);
  return best;
}

}  // namespace upbwit
