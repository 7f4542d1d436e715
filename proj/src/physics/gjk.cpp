#include "interact/physics/gjk.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace interact::physics {
namespace {

struct SupportPoint {
  Vec3 w;  // a − b
  Vec3 a;
  Vec3 b;
};

SupportPoint support(const ConvexCore& a, const ConvexCore& b, const Vec3& dir) {
  const Vec3 pa = a.support(dir);
  const Vec3 pb = b.support(-dir);
  return {pa - pb, pa, pb};
}

struct Simplex {
  std::array<SupportPoint, 4> pts;
  std::array<double, 4> lambda{};
  int size = 0;
};

// Closest point of the simplex hull to the origin. Every face is projected
// onto its affine hull; faces whose barycentric weights are all
// non-negative are candidates and the nearest one wins. The simplex is then
// reduced to that face.
Vec3 reduce_to_closest(Simplex& s) {
  double best_d2 = INFINITY;
  int best_mask = 0;
  std::array<double, 4> best_lambda{};
  const int n = s.size;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::array<int, 4> idx{};
    int m = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) idx[m++] = i;
    }
    std::array<double, 4> lam{};
    if (m == 1) {
      lam[0] = 1.0;
    } else {
      const Vec3& w0 = s.pts[idx[0]].w;
      Eigen::MatrixXd g(m - 1, m - 1);
      Eigen::VectorXd rhs(m - 1);
      std::array<Vec3, 3> e;
      for (int i = 1; i < m; ++i) e[i - 1] = s.pts[idx[i]].w - w0;
      for (int i = 0; i < m - 1; ++i) {
        rhs(i) = -e[i].dot(w0);
        for (int j = 0; j < m - 1; ++j) g(i, j) = e[i].dot(e[j]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
      lu.setThreshold(1e-12);
      if (lu.rank() < m - 1) continue;
      const Eigen::VectorXd mu = lu.solve(rhs);
      double sum = 0.0;
      for (int i = 0; i < m - 1; ++i) {
        lam[i + 1] = mu(i);
        sum += mu(i);
      }
      lam[0] = 1.0 - sum;
    }
    bool feasible = true;
    for (int i = 0; i < m; ++i) feasible = feasible && lam[i] >= 0.0;
    if (!feasible) continue;
    Vec3 p = Vec3::Zero();
    for (int i = 0; i < m; ++i) p += lam[i] * s.pts[idx[i]].w;
    const double d2 = p.squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_mask = mask;
      best_lambda = lam;
    }
  }
  if (best_mask == 0) {
    // Every face degenerate; keep the newest vertex.
    s.pts[0] = s.pts[n - 1];
    s.size = 1;
    s.lambda = {1.0, 0.0, 0.0, 0.0};
    return s.pts[0].w;
  }
  Simplex out;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1 << i)) {
      out.pts[out.size] = s.pts[i];
      out.lambda[out.size] = best_lambda[out.size];
      ++out.size;
    }
  }
  s = out;
  Vec3 v = Vec3::Zero();
  for (int i = 0; i < s.size; ++i) v += s.lambda[i] * s.pts[i].w;
  return v;
}

constexpr double kIntersectTol = 1e-10;

struct GjkRun {
  GjkResult result;
  Simplex simplex;
};

GjkRun run_gjk(const ConvexCore& a, const ConvexCore& b) {
  GjkRun run;
  Simplex& s = run.simplex;
  Vec3 v = a.vertices.front() - b.vertices.front();
  if (v.squaredNorm() == 0.0) v = Vec3::UnitX();
  double prev_d2 = INFINITY;
  bool first = true;
  int iter = 0;
  for (; iter < 128; ++iter) {
    const SupportPoint w = support(a, b, -v);
    const double vv = v.squaredNorm();
    if (!first && vv - v.dot(w.w) <= 1e-12 * vv + 1e-24) break;
    bool duplicate = false;
    for (int i = 0; i < s.size; ++i) duplicate = duplicate || s.pts[i].w == w.w;
    if (duplicate) break;
    s.pts[s.size++] = w;
    const Simplex before = s;
    const Vec3 nv = reduce_to_closest(s);
    const double d2 = nv.squaredNorm();
    if (!first && d2 >= prev_d2) {
      s = before;
      s.size--;
      break;
    }
    first = false;
    v = nv;
    prev_d2 = d2;
    if (std::sqrt(d2) <= kIntersectTol || s.size == 4) {
      run.result.intersecting = true;
      break;
    }
  }
  // Re-derive weights of the retained simplex so closest points are consistent.
  reduce_to_closest(s);
  Vec3 pa = Vec3::Zero();
  Vec3 pb = Vec3::Zero();
  for (int i = 0; i < s.size; ++i) {
    pa += s.lambda[i] * s.pts[i].a;
    pb += s.lambda[i] * s.pts[i].b;
  }
  run.result.point_a = pa;
  run.result.point_b = pb;
  run.result.distance = (pa - pb).norm();
  if (run.result.distance <= kIntersectTol) run.result.intersecting = true;
  if (run.result.intersecting) run.result.distance = 0.0;
  run.result.iterations = iter;
  return run;
}

struct Face {
  std::array<int, 3> v;
  Vec3 normal;
  double dist = 0.0;
};

std::optional<Face> make_face(const std::vector<SupportPoint>& pts, int i, int j, int k) {
  Vec3 n = (pts[j].w - pts[i].w).cross(pts[k].w - pts[i].w);
  const double len = n.norm();
  if (len <= 1e-300) return std::nullopt;
  n /= len;
  return Face{{i, j, k}, n, n.dot(pts[i].w)};
}

// Barycentric coordinates of p's projection onto triangle abc.
std::array<double, 3> barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 v0 = b - a;
  const Vec3 v1 = c - a;
  const Vec3 v2 = p - a;
  const double d00 = v0.dot(v0);
  const double d01 = v0.dot(v1);
  const double d11 = v1.dot(v1);
  const double d20 = v2.dot(v0);
  const double d21 = v2.dot(v1);
  const double denom = d00 * d11 - d01 * d01;
  if (std::abs(denom) <= 1e-300) return {1.0, 0.0, 0.0};
  const double v = (d11 * d20 - d01 * d21) / denom;
  const double w = (d00 * d21 - d01 * d20) / denom;
  return {1.0 - v - w, v, w};
}

// Grows the terminating GJK simplex to a tetrahedron. Fails when the
// Minkowski difference is flat.
bool expand_to_tetrahedron(const ConvexCore& a, const ConvexCore& b, std::vector<SupportPoint>& pts, double eps) {
  const auto try_dirs = [&](const std::vector<Vec3>& dirs, const auto& score) {
    double best = eps;
    std::optional<SupportPoint> pick;
    for (const auto& d : dirs) {
      const SupportPoint w = support(a, b, d);
      const double sc = score(w.w);
      if (sc > best) {
        best = sc;
        pick = w;
      }
    }
    if (pick) pts.push_back(*pick);
    return pick.has_value();
  };
  if (pts.size() == 1) {
    const std::vector<Vec3> dirs{Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
    const Vec3 p0 = pts[0].w;
    if (!try_dirs(dirs, [&](const Vec3& w) { return (w - p0).norm(); })) return false;
  }
  if (pts.size() == 2) {
    const Vec3 p0 = pts[0].w;
    const Vec3 d = (pts[1].w - p0).normalized();
    const Vec3 u = d.unitOrthogonal();
    const Vec3 v = d.cross(u);
    std::vector<Vec3> dirs;
    for (int k = 0; k < 6; ++k) {
      const double t = k * kPi / 3.0;
      dirs.push_back(std::cos(t) * u + std::sin(t) * v);
    }
    if (!try_dirs(dirs, [&](const Vec3& w) { return (w - p0 - d * d.dot(w - p0)).norm(); })) return false;
  }
  if (pts.size() == 3) {
    const Vec3 p0 = pts[0].w;
    const Vec3 n = (pts[1].w - p0).cross(pts[2].w - p0).normalized();
    if (!try_dirs({n, -n}, [&](const Vec3& w) { return std::abs(n.dot(w - p0)); })) return false;
  }
  return pts.size() == 4;
}

}  // namespace

GjkResult gjk_distance(const ConvexCore& a, const ConvexCore& b) { return run_gjk(a, b).result; }

std::optional<EpaResult> epa_penetration(const ConvexCore& a, const ConvexCore& b) {
  const GjkRun run = run_gjk(a, b);
  std::vector<SupportPoint> pts;
  for (int i = 0; i < run.simplex.size; ++i) pts.push_back(run.simplex.pts[i]);

  double scale = 1e-12;
  for (const auto& v : a.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (const auto& v : b.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  if (!expand_to_tetrahedron(a, b, pts, 1e-10 * scale)) return std::nullopt;

  std::vector<Face> faces;
  const Vec3 interior = (pts[0].w + pts[1].w + pts[2].w + pts[3].w) / 4.0;
  const auto add_face = [&](int i, int j, int k) {
    auto f = make_face(pts, i, j, k);
    if (!f) return;
    if (f->normal.dot(pts[i].w - interior) < 0.0) {
      std::swap(f->v[1], f->v[2]);
      f->normal = -f->normal;
      f->dist = -f->dist;
    }
    faces.push_back(*f);
  };
  add_face(0, 1, 2);
  add_face(0, 3, 1);
  add_face(0, 2, 3);
  add_face(1, 3, 2);
  if (faces.size() != 4) return std::nullopt;

  EpaResult out;
  out.converged = false;
  std::size_t best = 0;
  for (int iter = 0; iter < 64; ++iter) {
    best = 0;
    for (std::size_t i = 1; i < faces.size(); ++i) {
      if (faces[i].dist < faces[best].dist) best = i;
    }
    const Face f = faces[best];
    const SupportPoint w = support(a, b, f.normal);
    if (f.normal.dot(w.w) - f.dist <= 1e-10 * scale) {
      out.converged = true;
      break;
    }
    bool duplicate = false;
    for (const auto& p : pts) duplicate = duplicate || p.w == w.w;
    if (duplicate) {
      out.converged = true;
      break;
    }
    const int wi = static_cast<int>(pts.size());
    pts.push_back(w);

    std::vector<std::pair<int, int>> horizon;
    std::vector<Face> kept;
    for (const auto& face : faces) {
      if (face.normal.dot(w.w - pts[face.v[0]].w) > 0.0) {
        for (int e = 0; e < 3; ++e) {
          const std::pair<int, int> edge{face.v[e], face.v[(e + 1) % 3]};
          const auto rev = std::find(horizon.begin(), horizon.end(), std::make_pair(edge.second, edge.first));
          if (rev != horizon.end()) {
            horizon.erase(rev);
          } else {
            horizon.push_back(edge);
          }
        }
      } else {
        kept.push_back(face);
      }
    }
    faces = std::move(kept);
    for (const auto& [i, j] : horizon) {
      if (auto nf = make_face(pts, i, j, wi)) faces.push_back(*nf);
    }
    if (faces.empty()) return std::nullopt;
  }
  best = 0;
  for (std::size_t i = 1; i < faces.size(); ++i) {
    if (faces[i].dist < faces[best].dist) best = i;
  }
  const Face& f = faces[best];
  out.normal = f.normal;
  out.depth = std::max(0.0, f.dist);
  const auto lam = barycentric(f.normal * f.dist, pts[f.v[0]].w, pts[f.v[1]].w, pts[f.v[2]].w);
  out.point_a = lam[0] * pts[f.v[0]].a + lam[1] * pts[f.v[1]].a + lam[2] * pts[f.v[2]].a;
  out.point_b = lam[0] * pts[f.v[0]].b + lam[1] * pts[f.v[1]].b + lam[2] * pts[f.v[2]].b;
  return out;
}

}  // namespace interact::physics
