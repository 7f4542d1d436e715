#include "interact/physics/collide.hpp"

#include "interact/physics/gjk.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace interact::physics {

void closest_points_segments(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2, Vec3& c1, Vec3& c2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= 1e-300 && e <= 1e-300) {
    c1 = p1;
    c2 = p2;
    return;
  }
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  c1 = p1 + d1 * s;
  c2 = p2 + d2 * t;
}

namespace {

ContactPoint surface_contact(const Vec3& core_a, double ra, const Vec3& core_b, double rb, const Vec3& n, double depth) {
  ContactPoint c;
  c.normal = n;
  c.depth = std::max(0.0, depth);
  c.point = 0.5 * ((core_a + n * ra) + (core_b - n * rb));
  return c;
}

std::optional<ContactPoint> sphere_sphere(const Sphere& a, const Pose& pa, const Sphere& b, const Pose& pb) {
  const Vec3 d = pb.position - pa.position;
  const double dist = d.norm();
  const double depth = a.radius + b.radius - dist;
  if (depth < 0.0) return std::nullopt;
  const Vec3 n = dist > 0.0 ? Vec3(d / dist) : Vec3::UnitZ();
  return surface_contact(pa.position, a.radius, pb.position, b.radius, n, depth);
}

// Sphere first: the normal points from the sphere into the box.
std::optional<ContactPoint> sphere_box(const Sphere& s, const Pose& ps, const Box& b, const Pose& pb) {
  const Vec3 c = pb.inverse_transform_point(ps.position);
  const Vec3 h = b.half_extents;
  const Vec3 q = c.cwiseMax(-h).cwiseMin(h);
  if (q != c) {
    const Vec3 diff = c - q;
    const double dist = diff.norm();
    if (dist > s.radius) return std::nullopt;
    const Vec3 n = -(pb.orientation * (diff / dist));
    ContactPoint cp;
    cp.normal = n;
    cp.depth = s.radius - dist;
    cp.point = 0.5 * ((ps.position + n * s.radius) + pb.transform_point(q));
    return cp;
  }
  int axis = 0;
  double best = INFINITY;
  for (int i = 0; i < 3; ++i) {
    const double gap = h(i) - std::abs(c(i));
    if (gap < best) {
      best = gap;
      axis = i;
    }
  }
  const double sign = c(axis) >= 0.0 ? 1.0 : -1.0;
  Vec3 face = c;
  face(axis) = sign * h(axis);
  Vec3 local_n = Vec3::Zero();
  local_n(axis) = sign;
  const Vec3 n = -(pb.orientation * local_n);
  ContactPoint cp;
  cp.normal = n;
  cp.depth = s.radius + best;
  cp.point = 0.5 * ((ps.position + n * s.radius) + pb.transform_point(face));
  return cp;
}

struct OrientedBox {
  Vec3 c;
  Mat3 r;  // columns are the box axes in world space
  Vec3 h;
};

OrientedBox oriented(const Box& b, const Pose& p) { return {p.position, p.orientation.toRotationMatrix(), b.half_extents}; }

double projected_radius(const OrientedBox& b, const Vec3& axis) {
  return b.h.x() * std::abs(axis.dot(b.r.col(0))) + b.h.y() * std::abs(axis.dot(b.r.col(1))) +
         b.h.z() * std::abs(axis.dot(b.r.col(2)));
}

struct SatAxis {
  Vec3 normal;  // unit, A → B
  double overlap = INFINITY;
  int kind = -1;  // 0..2 face of A, 3..5 face of B, 6..14 edge pair
};

std::optional<SatAxis> sat_min_axis(const OrientedBox& a, const OrientedBox& b) {
  const Vec3 d = b.c - a.c;
  SatAxis best_face;
  SatAxis best_edge;
  const auto test = [&](Vec3 axis, int kind, SatAxis& best) {
    const double len = axis.norm();
    if (len < 1e-6) return true;  // near-parallel edges: covered by face axes
    axis /= len;
    const double dist = axis.dot(d);
    const double overlap = projected_radius(a, axis) + projected_radius(b, axis) - std::abs(dist);
    if (overlap < 0.0) return false;
    if (overlap < best.overlap) best = {dist >= 0.0 ? axis : Vec3(-axis), overlap, kind};
    return true;
  };
  for (int i = 0; i < 3; ++i) {
    if (!test(a.r.col(i), i, best_face)) return std::nullopt;
  }
  for (int i = 0; i < 3; ++i) {
    if (!test(b.r.col(i), 3 + i, best_face)) return std::nullopt;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!test(a.r.col(i).cross(b.r.col(j)), 6 + 3 * i + j, best_edge)) return std::nullopt;
    }
  }
  // Face axes give better manifolds; take an edge axis only when it is
  // clearly shallower.
  if (best_edge.kind >= 0 && best_edge.overlap < 0.95 * best_face.overlap - 1e-5) return best_edge;
  return best_face;
}

std::vector<ContactPoint> box_box_manifold(const OrientedBox& a, const OrientedBox& b, const SatAxis& ax) {
  std::vector<ContactPoint> out;
  const Vec3 n = ax.normal;
  if (ax.kind >= 6) {
    const int i = (ax.kind - 6) / 3;
    const int j = (ax.kind - 6) % 3;
    Vec3 pa = a.c;
    Vec3 pb = b.c;
    for (int k = 0; k < 3; ++k) {
      if (k != i) pa += (a.r.col(k).dot(n) >= 0.0 ? 1.0 : -1.0) * a.h(k) * a.r.col(k);
      if (k != j) pb += (b.r.col(k).dot(n) >= 0.0 ? -1.0 : 1.0) * b.h(k) * b.r.col(k);
    }
    Vec3 ca;
    Vec3 cb;
    closest_points_segments(pa - a.r.col(i) * a.h(i), pa + a.r.col(i) * a.h(i), pb - b.r.col(j) * b.h(j),
                            pb + b.r.col(j) * b.h(j), ca, cb);
    ContactPoint cp;
    cp.normal = n;
    cp.depth = ax.overlap;
    cp.point = 0.5 * (ca + cb);
    out.push_back(cp);
    return out;
  }

  const bool ref_is_a = ax.kind < 3;
  const OrientedBox& ref = ref_is_a ? a : b;
  const OrientedBox& inc = ref_is_a ? b : a;
  const int ref_axis = ax.kind % 3;
  const Vec3 ref_n = ref_is_a ? n : Vec3(-n);
  const double ref_sign = ref.r.col(ref_axis).dot(ref_n) >= 0.0 ? 1.0 : -1.0;
  const Vec3 ref_center = ref.c + ref_sign * ref.h(ref_axis) * ref.r.col(ref_axis);

  int inc_axis = 0;
  double most = -1.0;
  for (int k = 0; k < 3; ++k) {
    const double d = std::abs(inc.r.col(k).dot(ref_n));
    if (d > most) {
      most = d;
      inc_axis = k;
    }
  }
  const double inc_sign = inc.r.col(inc_axis).dot(ref_n) >= 0.0 ? -1.0 : 1.0;
  const Vec3 inc_center = inc.c + inc_sign * inc.h(inc_axis) * inc.r.col(inc_axis);
  const int u = (inc_axis + 1) % 3;
  const int v = (inc_axis + 2) % 3;
  const Vec3 eu = inc.r.col(u) * inc.h(u);
  const Vec3 ev = inc.r.col(v) * inc.h(v);
  std::vector<Vec3> poly{inc_center + eu + ev, inc_center - eu + ev, inc_center - eu - ev, inc_center + eu - ev};

  for (int k = 0; k < 3; ++k) {
    if (k == ref_axis) continue;
    for (const double s : {1.0, -1.0}) {
      const Vec3 pn = s * ref.r.col(k);
      const double off = pn.dot(ref.c) + ref.h(k);
      std::vector<Vec3> clipped;
      for (std::size_t m = 0; m < poly.size(); ++m) {
        const Vec3& p = poly[m];
        const Vec3& q = poly[(m + 1) % poly.size()];
        const double dp = pn.dot(p) - off;
        const double dq = pn.dot(q) - off;
        if (dp <= 0.0) clipped.push_back(p);
        if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) clipped.push_back(p + (q - p) * (dp / (dp - dq)));
      }
      poly = std::move(clipped);
      if (poly.empty()) break;
    }
  }
  for (const auto& p : poly) {
    const double sep = ref_n.dot(p - ref_center);
    if (sep > 0.0) continue;
    ContactPoint cp;
    cp.normal = n;
    cp.depth = -sep;
    cp.point = p - ref_n * (0.5 * sep);
    out.push_back(cp);
    if (out.size() == 8) break;
  }
  return out;
}

std::optional<ContactPoint> box_box(const Box& ba, const Pose& pa, const Box& bb, const Pose& pb) {
  const OrientedBox a = oriented(ba, pa);
  const OrientedBox b = oriented(bb, pb);
  const auto ax = sat_min_axis(a, b);
  if (!ax) return std::nullopt;
  ContactPoint cp;
  cp.normal = ax->normal;
  cp.depth = ax->overlap;
  const auto pts = box_box_manifold(a, b, *ax);
  if (pts.empty()) {
    cp.point = 0.5 * (a.c + b.c);
  } else {
    const auto deepest =
        std::max_element(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.depth < y.depth; });
    cp.point = deepest->point;
  }
  return cp;
}

Vec3 centroid(const ConvexCore& c) {
  Vec3 s = Vec3::Zero();
  for (const auto& v : c.vertices) s += v;
  return s / static_cast<double>(c.vertices.size());
}

std::optional<Vec3> core_axis(const ConvexCore& c) {
  if (c.vertices.size() != 2) return std::nullopt;
  const Vec3 d = c.vertices[1] - c.vertices[0];
  if (d.norm() <= 0.0) return std::nullopt;
  return d.normalized();
}

// Overlapping point/segment cores: any direction perpendicular to the
// cores separates them by the summed margins.
Vec3 flat_overlap_normal(const ConvexCore& a, const ConvexCore& b) {
  const Vec3 towards = centroid(b) - centroid(a);
  const auto da = core_axis(a);
  const auto db = core_axis(b);
  Vec3 n = Vec3::Zero();
  if (da && db && da->cross(*db).norm() > 1e-9) {
    n = da->cross(*db).normalized();
  } else if (da || db) {
    const Vec3 d = da ? *da : *db;
    const Vec3 perp = towards - d * d.dot(towards);
    n = perp.norm() > 1e-12 ? Vec3(perp.normalized()) : d.unitOrthogonal();
  } else {
    n = towards.norm() > 0.0 ? Vec3(towards.normalized()) : Vec3::UnitZ();
  }
  if (n.dot(towards) < 0.0) n = -n;
  return n;
}

std::optional<ContactPoint> convex_pair(const ColliderShape& sa, const Pose& pa, const ColliderShape& sb,
                                        const Pose& pb) {
  const ConvexCore a = make_core(sa, pa);
  const ConvexCore b = make_core(sb, pb);
  const double margins = a.margin + b.margin;
  const GjkResult g = gjk_distance(a, b);
  if (!g.intersecting) {
    if (g.distance > margins) return std::nullopt;
    const Vec3 n = (g.point_b - g.point_a) / g.distance;
    return surface_contact(g.point_a, a.margin, g.point_b, b.margin, n, margins - g.distance);
  }
  if (const auto e = epa_penetration(a, b)) {
    ContactPoint cp = surface_contact(e->point_a, a.margin, e->point_b, b.margin, e->normal, e->depth + margins);
    cp.degenerate = !e->converged;
    return cp;
  }
  const Vec3 n = flat_overlap_normal(a, b);
  return surface_contact(g.point_a, a.margin, g.point_b, b.margin, n, margins);
}

std::optional<ContactPoint> ordered_pair(const ColliderShape& a, const Pose& pa, const ColliderShape& b,
                                         const Pose& pb) {
  if (const auto* sa = std::get_if<Sphere>(&a)) {
    if (const auto* sb = std::get_if<Sphere>(&b)) return sphere_sphere(*sa, pa, *sb, pb);
    if (const auto* bb = std::get_if<Box>(&b)) return sphere_box(*sa, pa, *bb, pb);
  }
  if (const auto* ba = std::get_if<Box>(&a)) {
    if (const auto* sb = std::get_if<Sphere>(&b)) {
      auto c = sphere_box(*sb, pb, *ba, pa);
      if (c) c->normal = -c->normal;
      return c;
    }
    if (const auto* bb = std::get_if<Box>(&b)) return box_box(*ba, pa, *bb, pb);
  }
  return convex_pair(a, pa, b, pb);
}

std::vector<double> order_key(const ColliderShape& s, const Pose& p) {
  std::vector<double> key{static_cast<double>(s.index()),
                          p.position.x(),
                          p.position.y(),
                          p.position.z(),
                          p.orientation.w(),
                          p.orientation.x(),
                          p.orientation.y(),
                          p.orientation.z()};
  std::visit(
      [&](const auto& sh) {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          key.push_back(sh.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          key.insert(key.end(), sh.half_extents.data(), sh.half_extents.data() + 3);
        } else if constexpr (std::is_same_v<T, Capsule>) {
          key.push_back(sh.radius);
          key.push_back(sh.half_height);
        } else {
          for (const auto& v : sh.vertices) key.insert(key.end(), v.data(), v.data() + 3);
        }
      },
      s);
  return key;
}

// True when (b, pb) should be evaluated as the first shape.
bool swap_order(const ColliderShape& a, const Pose& pa, const ColliderShape& b, const Pose& pb) {
  return order_key(b, pb) < order_key(a, pa);
}

std::vector<ContactPoint> ordered_manifold(const ColliderShape& a, const Pose& pa, const ColliderShape& b,
                                           const Pose& pb) {
  const auto* ba = std::get_if<Box>(&a);
  const auto* bb = std::get_if<Box>(&b);
  if (ba && bb) {
    const OrientedBox oa = oriented(*ba, pa);
    const OrientedBox ob = oriented(*bb, pb);
    const auto ax = sat_min_axis(oa, ob);
    if (!ax) return {};
    auto pts = box_box_manifold(oa, ob, *ax);
    if (pts.empty()) {
      if (auto c = box_box(*ba, pa, *bb, pb)) pts.push_back(*c);
    }
    return pts;
  }
  std::vector<ContactPoint> out;
  const auto single = ordered_pair(a, pa, b, pb);
  if (!single) return out;
  out.push_back(*single);
  const auto add_caps = [&](const ColliderShape& cap_shape, const Pose& cap_pose, bool cap_first) {
    const auto* cap = std::get_if<Capsule>(&cap_shape);
    if (!cap) return;
    for (const double s : {1.0, -1.0}) {
      const Pose end{cap_pose.transform_point(Vec3(0, 0, s * cap->half_height)), cap_pose.orientation};
      const Sphere ball{cap->radius};
      const auto c = cap_first ? ordered_pair(ball, end, b, pb) : ordered_pair(a, pa, ball, end);
      if (!c) continue;
      const bool distinct =
          std::none_of(out.begin(), out.end(), [&](const auto& o) { return (o.point - c->point).norm() < 1e-4; });
      if (distinct) out.push_back(*c);
    }
  };
  add_caps(a, pa, true);
  add_caps(b, pb, false);
  return out;
}

}  // namespace

std::optional<ContactPoint> collide_pair(const ColliderShape& a, const Pose& pa, const ColliderShape& b,
                                         const Pose& pb) {
  if (!swap_order(a, pa, b, pb)) return ordered_pair(a, pa, b, pb);
  auto c = ordered_pair(b, pb, a, pa);
  if (c) c->normal = -c->normal;
  return c;
}

std::vector<ContactPoint> collide_manifold(const ColliderShape& a, const Pose& pa, const ColliderShape& b,
                                           const Pose& pb) {
  if (!swap_order(a, pa, b, pb)) return ordered_manifold(a, pa, b, pb);
  auto pts = ordered_manifold(b, pb, a, pa);
  for (auto& c : pts) c.normal = -c.normal;
  return pts;
}

double shape_distance(const ColliderShape& a, const Pose& pa, const ColliderShape& b, const Pose& pb) {
  const ConvexCore ca = make_core(a, pa);
  const ConvexCore cb = make_core(b, pb);
  const GjkResult g = gjk_distance(ca, cb);
  return std::max(0.0, g.distance - ca.margin - cb.margin);
}

}  // namespace interact::physics
