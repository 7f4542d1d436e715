#include "interact/session/score.hpp"

#include <algorithm>
#include <cmath>

namespace interact::session {

double time_factor(double duration, double par) {
  if (duration <= par) return 1.0;
  return std::max(kFactorFloor, 1.0 - 0.5 * (duration - par) / par);
}

double accuracy_factor(const PoseError& residual, double pos_tol, double rot_tol) {
  const double a = 1.0 - 0.25 * (residual.d_pos / pos_tol + residual.d_rot / rot_tol);
  return std::clamp(a, kFactorFloor, 1.0);
}

double step_score(double time_factor, double accuracy_factor, double penalty_per_hint, int hints) {
  const double s = kBaseScore * time_factor * accuracy_factor - penalty_per_hint * hints;
  return std::clamp(s, 0.0, kBaseScore);
}

double round_tenth(double v) {
  // The decimal string of v decides the tie, so 0.05 rounds to 0.1 even
  // though its binary value is slightly below the half.
  const double scaled = v * 10.0;
  double r = std::round(scaled);
  if (std::abs(scaled - std::trunc(scaled)) != 0.5) {
    const double nearest_tie = std::trunc(scaled) + std::copysign(0.5, scaled);
    if (std::abs(scaled - nearest_tie) < 1e-9 * std::max(1.0, std::abs(scaled))) {
      r = std::trunc(scaled) + std::copysign(1.0, scaled);
    }
  }
  return r / 10.0;
}

double session_total(const std::vector<StepScore>& steps) {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : steps) sum += s.step_score;
  return round_tenth(sum / static_cast<double>(steps.size()));
}

}  // namespace interact::session
