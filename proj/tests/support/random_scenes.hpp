#pragma once

#include "interact/replay/replay.hpp"
#include "interact/scene/types.hpp"

#include <random>
#include <vector>

namespace testing_support {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
interact::Vec3 random_vec(Rng& rng, double extent);
interact::Quat random_rotation(Rng& rng);
interact::Pose random_pose(Rng& rng, double extent);

/// Random box, capsule or hull of size ~[0.2, 1]; spheres when allowed.
interact::ColliderShape random_shape(Rng& rng, bool allow_sphere = true);
interact::ConvexHull random_hull(Rng& rng, int min_vertices = 4, int max_vertices = 12);

/// Random condition over atoms done(s0..s{k-1}) and flag(f0..f{k-1}); at
/// most `max_atoms` atom occurrences.
interact::Cond random_condition(Rng& rng, int distinct_atoms, int max_atoms);

/// Random inputs for `ticks` tick calls: hand poses near parts, grabs (some
/// of unknown parts), releases, presses, hints, skips and flags, valid or not.
std::vector<interact::replay::TraceRecord> random_trace(Rng& rng, const interact::Scenario& s, std::uint64_t ticks,
                                                        double inputs_per_tick = 0.5);

}  // namespace testing_support
