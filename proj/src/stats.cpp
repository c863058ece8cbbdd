#include "stablebench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stablebench {

namespace {

constexpr double kCfTolerance = 1e-12;
constexpr int kCfMaxIterations = 300;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kCfTolerance) break;
  }
  return h;
}

struct Moments {
  double mean;
  double var;  // sample variance
  double n;
};

Moments moments(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double mean = std::clamp(sum / n, *lo, *hi);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, xs.size() > 1 ? ss / (n - 1.0) : 0.0, n};
}

}  // namespace

std::string_view to_string(TTestVariant v) {
  return v == TTestVariant::welch ? "welch" : "pooled";
}

Stats describe(std::span<const double> samples) {
  if (samples.empty()) {
    throw DataError("cannot describe an empty sample");
  }
  const auto m = moments(samples);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  Stats s;
  s.n = samples.size();
  s.mean = m.mean;
  if (samples.size() > 1) s.stddev = std::sqrt(m.var);
  s.min = *lo;
  s.max = *hi;
  return s;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_p_value(double t, double df) {
  if (!(df > 0.0)) {
    throw DataError("t distribution needs positive degrees of freedom");
  }
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTestResult t_test(std::span<const double> a, std::span<const double> b, TTestVariant variant,
                   double threshold) {
  if (a.size() < 2 || b.size() < 2) {
    throw DataError("t-test needs at least two samples on each side");
  }
  const auto ma = moments(a);
  const auto mb = moments(b);

  TTestResult r;
  r.variant = variant;
  const double diff = ma.mean - mb.mean;

  double se2 = 0.0;
  if (variant == TTestVariant::pooled) {
    r.df = ma.n + mb.n - 2.0;
    const double pooled = ((ma.n - 1.0) * ma.var + (mb.n - 1.0) * mb.var) / r.df;
    se2 = pooled * (1.0 / ma.n + 1.0 / mb.n);
  } else {
    const double va = ma.var / ma.n;
    const double vb = mb.var / mb.n;
    se2 = va + vb;
    const double denom = va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0);
    r.df = denom > 0.0 ? se2 * se2 / denom : ma.n + mb.n - 2.0;
  }

  if (se2 <= 0.0) {
    if (diff == 0.0) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.t = diff > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
      r.degenerate = true;
    }
  } else {
    r.t = diff / std::sqrt(se2);
    r.p_two_sided = t_p_value(r.t, r.df);
  }
  r.significant = r.p_two_sided < threshold;
  return r;
}

}  // namespace stablebench
