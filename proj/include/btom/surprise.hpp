#pragma once

// Surprise measures over predicted action distributions.

#include <string_view>
#include <vector>

#include "btom/beliefs.hpp"

namespace btom {

enum class Measure : std::uint8_t { S1, S2 };

std::string_view measure_name(Measure m);
std::optional<Measure> measure_from_name(std::string_view name);

/// Probabilities below this are clamped before taking the logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

/// Negative log-likelihood; p is clamped to [floor, 1] so rounding above 1
/// cannot give a negative value.
double s1(double p_observed);

/// ln(1 + p_max - p_observed). Throws Error{OrderViolation} if
/// p_observed exceeds p_max.
double s2(double p_observed, double p_max);

/// Surprise of observing `a` under `prediction`.
double surprise(Measure m, const ActionDistribution& prediction, Action a);

struct SurpriseTrace {
  Measure measure = Measure::S1;
  std::vector<double> steps;
  /// Running total after each step.
  std::vector<double> cumulative;

  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

SurpriseTrace accumulate(SurpriseTrace trace, double step_value);

}  // namespace btom
