#include "btom/surprise.hpp"

#include <algorithm>
#include <cmath>

namespace btom {

std::string_view measure_name(Measure m) { return m == Measure::S1 ? "S1" : "S2"; }

std::optional<Measure> measure_from_name(std::string_view name) {
  if (name == "S1" || name == "s1") return Measure::S1;
  if (name == "S2" || name == "s2") return Measure::S2;
  return std::nullopt;
}

double s1(double p_observed) { return -std::log(std::clamp(p_observed, kProbabilityFloor, 1.0)); }

double s2(double p_observed, double p_max) {
  if (p_observed > p_max) throw Error(ErrorCode::OrderViolation, "observed probability exceeds the maximum");
  return std::log1p(p_max - p_observed);
}

double surprise(Measure m, const ActionDistribution& prediction, Action a) {
  const double p = prediction[static_cast<std::size_t>(a)];
  if (m == Measure::S1) return s1(p);
  return s2(p, *std::max_element(prediction.begin(), prediction.end()));
}

SurpriseTrace accumulate(SurpriseTrace trace, double step_value) {
  if (!(step_value >= 0.0)) throw Error(ErrorCode::InvalidConfig, "surprise must be non-negative");
  trace.steps.push_back(step_value);
  trace.cumulative.push_back(trace.total() + step_value);
  return trace;
}

}  // namespace btom
