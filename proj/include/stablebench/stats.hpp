#pragma once

#include <span>
#include <string_view>

#include "stablebench/core.hpp"

namespace stablebench {

inline constexpr double kDefaultSignificance = 0.001;

enum class TTestVariant { pooled, welch };

std::string_view to_string(TTestVariant v);

struct TTestResult {
  double t = 0.0;           // > 0 when mean(a) > mean(b); may be +/-inf
  double df = 0.0;
  double p_two_sided = 1.0;
  TTestVariant variant = TTestVariant::pooled;
  bool significant = false;
  bool degenerate = false;  // zero variance with unequal means

  friend bool operator==(const TTestResult&, const TTestResult&) = default;
};

/// Mean, sample stddev (absent for one sample), min, max. Throws DataError when empty.
Stats describe(std::span<const double> samples);

/// Independent two-sample t-test, two-sided. Throws DataError if either
/// sample has fewer than two values.
TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   TTestVariant variant = TTestVariant::pooled,
                   double threshold = kDefaultSignificance);

/// Two-sided p-value of Student's t. Throws DataError for df <= 0.
double t_p_value(double t, double df);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace stablebench
