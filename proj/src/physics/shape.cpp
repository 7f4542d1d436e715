#include "interact/physics/shape.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace interact::physics {

Aabb world_aabb(const ColliderShape& shape, const Pose& pose) {
  return std::visit(
      [&](const auto& s) -> Aabb {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {pose.position - Vec3::Constant(s.radius), pose.position + Vec3::Constant(s.radius)};
        } else if constexpr (std::is_same_v<T, Box>) {
          const Vec3 ext = pose.orientation.toRotationMatrix().cwiseAbs() * s.half_extents;
          return {pose.position - ext, pose.position + ext};
        } else if constexpr (std::is_same_v<T, Capsule>) {
          const Vec3 axis = pose.orientation * Vec3(0, 0, s.half_height);
          const Vec3 a = pose.position + axis;
          const Vec3 b = pose.position - axis;
          return {a.cwiseMin(b) - Vec3::Constant(s.radius), a.cwiseMax(b) + Vec3::Constant(s.radius)};
        } else {
          Aabb box{Vec3::Constant(INFINITY), Vec3::Constant(-INFINITY)};
          for (const auto& v : s.vertices) {
            const Vec3 w = pose.transform_point(v);
            box.lo = box.lo.cwiseMin(w);
            box.hi = box.hi.cwiseMax(w);
          }
          return box;
        }
      },
      shape);
}

Vec3 ConvexCore::support(const Vec3& dir) const {
  std::size_t best = 0;
  double best_dot = vertices[0].dot(dir);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double d = vertices[i].dot(dir);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return vertices[best];
}

int ConvexCore::dimension() const {
  if (vertices.size() < 2) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vertices.size()), 3);
  Vec3 c = Vec3::Zero();
  for (const auto& v : vertices) c += v;
  c /= static_cast<double>(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = (vertices[i] - c).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 1e-12) return 0;
  int dim = 1;
  for (int i = 1; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * sv(0)) ++dim;
  }
  return dim;
}

ConvexCore make_core(const ColliderShape& shape, const Pose& pose) {
  return std::visit(
      [&](const auto& s) -> ConvexCore {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{pose.position}, s.radius};
        } else if constexpr (std::is_same_v<T, Box>) {
          ConvexCore core;
          for (int i = 0; i < 8; ++i) {
            const Vec3 local((i & 1) ? s.half_extents.x() : -s.half_extents.x(),
                             (i & 2) ? s.half_extents.y() : -s.half_extents.y(),
                             (i & 4) ? s.half_extents.z() : -s.half_extents.z());
            core.vertices.push_back(pose.transform_point(local));
          }
          return core;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return {{pose.transform_point(Vec3(0, 0, s.half_height)), pose.transform_point(Vec3(0, 0, -s.half_height))},
                  s.radius};
        } else {
          ConvexCore core;
          for (const auto& v : s.vertices) core.vertices.push_back(pose.transform_point(v));
          return core;
        }
      },
      shape);
}

namespace {

double vertex_scale(const std::vector<Vec3>& vs) {
  double s = 0.0;
  for (const auto& v : vs) s = std::max(s, v.cwiseAbs().maxCoeff());
  return std::max(s, 1e-12);
}

// Vertices of one facet ordered counter-clockwise about `n` (monotone chain).
std::vector<Vec3> facet_polygon(const std::vector<Vec3>& on_plane, const Vec3& n) {
  const Vec3 u = n.unitOrthogonal();
  const Vec3 w = n.cross(u);
  std::vector<std::pair<Eigen::Vector2d, Vec3>> pts;
  for (const auto& p : on_plane) pts.push_back({{p.dot(u), p.dot(w)}, p});
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first.x() < b.first.x() || (a.first.x() == b.first.x() && a.first.y() < b.first.y());
  });
  const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<std::pair<Eigen::Vector2d, Vec3>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2].first, hull[k - 1].first, pts[i].first) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2].first, hull[k - 1].first, pts[i].first) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  std::vector<Vec3> out;
  for (const auto& h : hull) out.push_back(h.second);
  return out;
}

struct Facet {
  HullFace plane;
  std::vector<Vec3> polygon;
};

std::vector<Facet> hull_facets(const std::vector<Vec3>& vs) {
  const double eps = 1e-9 * vertex_scale(vs);
  std::vector<Facet> facets;
  const std::size_t n = vs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Vec3 normal = (vs[j] - vs[i]).cross(vs[k] - vs[i]);
        const double len = normal.norm();
        if (len <= eps * eps) continue;
        normal /= len;
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const auto& v : vs) {
          const double d = normal.dot(v - vs[i]);
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
        if (hi > eps && lo < -eps) continue;
        if (hi > eps) normal = -normal;
        const double offset = normal.dot(vs[i]);
        const bool seen = std::any_of(facets.begin(), facets.end(), [&](const Facet& f) {
          return (f.plane.normal - normal).norm() < 1e-9 && std::abs(f.plane.offset - offset) <= eps;
        });
        if (seen) continue;
        std::vector<Vec3> on_plane;
        for (const auto& v : vs) {
          if (std::abs(normal.dot(v) - offset) <= eps) on_plane.push_back(v);
        }
        facets.push_back({{normal, offset}, facet_polygon(on_plane, normal)});
      }
    }
  }
  return facets;
}

}  // namespace

std::vector<HullFace> hull_planes(const std::vector<Vec3>& vertices) {
  std::vector<HullFace> out;
  for (const auto& f : hull_facets(vertices)) out.push_back(f.plane);
  return out;
}

std::vector<std::array<Vec3, 3>> hull_triangles(const std::vector<Vec3>& vertices) {
  std::vector<std::array<Vec3, 3>> out;
  for (const auto& f : hull_facets(vertices)) {
    for (std::size_t i = 1; i + 1 < f.polygon.size(); ++i) out.push_back({f.polygon[0], f.polygon[i], f.polygon[i + 1]});
  }
  return out;
}

MassProperties mass_properties(const ColliderShape& shape, double mass) {
  MassProperties mp;
  mp.mass = mass;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          mp.volume = 4.0 / 3.0 * kPi * std::pow(s.radius, 3);
          mp.inertia = Mat3::Identity() * (0.4 * mass * s.radius * s.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          const Vec3 e = 2.0 * s.half_extents;
          mp.volume = e.prod();
          mp.inertia = Vec3(e.y() * e.y() + e.z() * e.z(), e.x() * e.x() + e.z() * e.z(), e.x() * e.x() + e.y() * e.y())
                           .asDiagonal();
          mp.inertia *= mass / 12.0;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          const double r = s.radius;
          const double h = 2.0 * s.half_height;
          const double v_cyl = kPi * r * r * h;
          const double v_caps = 4.0 / 3.0 * kPi * r * r * r;
          mp.volume = v_cyl + v_caps;
          const double m_cyl = mass * v_cyl / mp.volume;
          const double m_caps = mass * v_caps / mp.volume;
          const double axial = m_cyl * r * r / 2.0 + m_caps * 2.0 * r * r / 5.0;
          const double transverse =
              m_cyl * (r * r / 4.0 + h * h / 12.0) + m_caps * (2.0 * r * r / 5.0 + h * h / 4.0 + 3.0 * h * r / 8.0);
          mp.inertia = Vec3(transverse, transverse, axial).asDiagonal();
        } else {
          // Signed tetrahedra (origin, a, b, c) over the outward triangles.
          Mat3 canonical;
          canonical << 2, 1, 1, 1, 2, 1, 1, 1, 2;
          canonical /= 120.0;
          Mat3 cov = Mat3::Zero();
          double volume = 0.0;
          for (const auto& t : hull_triangles(s.vertices)) {
            Mat3 a;
            a.col(0) = t[0];
            a.col(1) = t[1];
            a.col(2) = t[2];
            const double det = a.determinant();
            volume += det / 6.0;
            cov += det * a * canonical * a.transpose();
          }
          mp.volume = volume;
          const double density = volume > 0.0 ? mass / volume : 0.0;
          mp.inertia = density * (cov.trace() * Mat3::Identity() - cov);
        }
      },
      shape);
  return mp;
}

}  // namespace interact::physics
