#include "interact/physics/broadphase.hpp"

#include "interact/physics/shape.hpp"

#include <algorithm>
#include <numeric>

namespace interact::physics {

std::vector<std::pair<std::size_t, std::size_t>> broadphase_pairs(const std::vector<RigidBody>& bodies, double margin) {
  std::vector<Aabb> boxes(bodies.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (!bodies[i].active) continue;
    boxes[i] = world_aabb(bodies[i].shape, bodies[i].pose).inflated(margin);
    order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return boxes[a].lo.x() < boxes[b].lo.x() || (boxes[a].lo.x() == boxes[b].lo.x() && a < b);
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> open;
  for (const std::size_t i : order) {
    const double x = boxes[i].lo.x();
    open.erase(std::remove_if(open.begin(), open.end(), [&](std::size_t j) { return boxes[j].hi.x() < x; }),
               open.end());
    for (const std::size_t j : open) {
      if (boxes[i].overlaps(boxes[j])) pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    open.push_back(i);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace interact::physics
