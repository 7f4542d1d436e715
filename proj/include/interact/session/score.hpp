#pragma once

#include "interact/scene/pose_error.hpp"

#include <string>
#include <vector>

namespace interact::session {

inline constexpr double kBaseScore = 100.0;
inline constexpr double kFactorFloor = 0.5;

struct StepScore {
  std::string id;
  std::string kind;    // placing | action | tooluse
  std::string status;  // completed | skipped | incomplete
  double duration = 0.0;  // s from activation to completion
  double par = 0.0;       // s, already scaled by the difficulty
  double time_factor = 1.0;
  double accuracy_factor = 1.0;
  int hints = 0;
  double hint_penalty = 0.0;  // points deducted in total
  PoseError residual;
  bool skipped = false;
  bool incomplete = false;
  double step_score = 0.0;
};

struct ScoreReport {
  std::string scenario;
  std::string difficulty;
  bool abandoned = false;
  std::vector<StepScore> steps;
  double total = 0.0;  // one decimal
};

/// 1 up to par, then linear down to the floor at twice par.
double time_factor(double duration, double par);

/// 1 − 0.25·(d_pos/pos_tol + d_rot/rot_tol), clamped to [0.5, 1].
double accuracy_factor(const PoseError& residual, double pos_tol, double rot_tol);

/// clamp(100·time_factor·accuracy_factor − penalty·hints, 0, 100).
double step_score(double time_factor, double accuracy_factor, double penalty_per_hint, int hints);

/// Mean rounded half away from zero to one decimal; 0 for no steps.
double session_total(const std::vector<StepScore>& steps);

/// Round half away from zero to one decimal.
double round_tenth(double v);

}  // namespace interact::session
