#pragma once
// Lower convex hulls used by the envelope iteration: a monotone-chain hull
// for functions of one variable and a quickhull-based lower hull for
// functions of two. Both return the hull as evaluable data; the 2-D hull is
// evaluated as the max over its lower-facet planes, each of which supports
// the whole point set from below, so no point location is needed.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "common.hpp"

namespace demlab {

/// Largest convex minorant of (xs[i], ys[i]) sampled back at xs. xs must be
/// strictly increasing, ys finite.
inline std::vector<double> convex_minorant_1d(const std::vector<double>& xs,
                                              const std::vector<double>& ys) {
  const size_t N = xs.size();
  if (N != ys.size() || N == 0) throw ArgumentError("convex minorant: size mismatch");
  for (size_t i = 0; i + 1 < N; ++i)
    if (!(xs[i] < xs[i + 1])) throw ArgumentError("convex minorant: xs must increase");
  for (double y : ys)
    if (!std::isfinite(y)) throw ArgumentError("convex minorant: values must be finite");
  if (N == 1) return ys;

  std::vector<size_t> h;  // hull vertex indices
  for (size_t i = 0; i < N; ++i) {
    while (h.size() >= 2) {
      const size_t a = h[h.size() - 2], b = h[h.size() - 1];
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) -
                           (xs[i] - xs[a]) * (ys[b] - ys[a]);
      if (cross <= 0) h.pop_back();  // b is not a vertex of the minorant
      else break;
    }
    h.push_back(i);
  }

  std::vector<double> out(N);
  size_t seg = 0;
  for (size_t i = 0; i < N; ++i) {
    while (seg + 1 < h.size() && xs[h[seg + 1]] < xs[i]) ++seg;
    if (seg + 1 == h.size()) {
      out[i] = ys[h[seg]];
      continue;
    }
    const size_t a = h[seg], b = h[seg + 1];
    const double t = (xs[i] - xs[a]) / (xs[b] - xs[a]);
    out[i] = ys[a] + t * (ys[b] - ys[a]);
  }
  return out;
}

/// Affine lower bounds z >= a x + b y + c whose max is the lower convex
/// envelope of a 3-D point set over the projection of its hull.
struct LowerHull2 {
  struct Plane {
    double a, b, c;
  };
  std::vector<Plane> planes;

  double eval(double x, double y) const {
    double m = kNegInf;
    for (const Plane& p : planes) m = std::max(m, p.a * x + p.b * y + p.c);
    return m;
  }
};

namespace detail {

using V3 = std::array<double, 3>;

inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm3(const V3& a) { return std::sqrt(dot(a, a)); }

struct HFace {
  int a, b, c;
  V3 n;
  double d;
  bool alive = true;
  std::vector<int> outside;
};

inline double face_dist(const HFace& f, const V3& p) { return dot(f.n, p) - f.d; }

inline HFace make_face(const std::vector<V3>& P, int a, int b, int c, const V3& interior) {
  HFace f;
  f.a = a;
  f.b = b;
  f.c = c;
  f.n = cross(sub(P[b], P[a]), sub(P[c], P[a]));
  const double nn = norm3(f.n);
  if (nn > 0)
    for (double& x : f.n) x /= nn;
  f.d = dot(f.n, P[a]);
  if (face_dist(f, interior) > 0) {  // orient outward
    std::swap(f.b, f.c);
    for (double& x : f.n) x = -x;
    f.d = -f.d;
  }
  return f;
}

}  // namespace detail

/// Lower hull of points (x_i, y_i, z_i) via quickhull on the full hull.
/// Coordinates are normalized to the unit box internally; the returned
/// planes are in the original coordinates. A fully coplanar input with a
/// non-vertical common plane yields that single plane.
inline LowerHull2 lower_hull_2d(const std::vector<std::array<double, 3>>& pts) {
  using detail::V3;
  const size_t N = pts.size();
  if (N < 3) throw ArgumentError("lower hull: need at least 3 points");
  for (const auto& p : pts)
    for (double x : p)
      if (!std::isfinite(x)) throw ArgumentError("lower hull: coordinates must be finite");

  // normalize to the unit box
  V3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts)
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  V3 scale;
  for (int k = 0; k < 3; ++k) scale[k] = hi[k] > lo[k] ? hi[k] - lo[k] : 1.0;
  std::vector<V3> P(N);
  for (size_t i = 0; i < N; ++i)
    for (int k = 0; k < 3; ++k) P[i][k] = (pts[i][k] - lo[k]) / scale[k];
  const double tol = 1e-10;

  // initial simplex: farthest pair, then farthest from the line, then from the plane
  size_t i0 = 0, i1 = 0;
  double best = -1;
  for (size_t i = 0; i < N; ++i)
    for (size_t j = i + 1; j < N; ++j) {
      const double d = detail::norm3(detail::sub(P[i], P[j]));
      if (d > best) {
        best = d;
        i0 = i;
        i1 = j;
      }
    }
  if (best < tol) throw ArgumentError("lower hull: points coincide");
  size_t i2 = i0;
  best = -1;
  const V3 e01 = detail::sub(P[i1], P[i0]);
  for (size_t i = 0; i < N; ++i) {
    const double d = detail::norm3(detail::cross(e01, detail::sub(P[i], P[i0])));
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (best < tol) throw ArgumentError("lower hull: points are collinear");
  V3 n0 = detail::cross(e01, detail::sub(P[i2], P[i0]));
  {
    const double nn = detail::norm3(n0);
    for (double& x : n0) x /= nn;
  }
  size_t i3 = i0;
  best = -1;
  for (size_t i = 0; i < N; ++i) {
    const double d = std::fabs(detail::dot(n0, detail::sub(P[i], P[i0])));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }

  LowerHull2 out;
  auto emit = [&](const V3& n, double d) {
    // outward plane n . x = d in normalized coords; keep downward-facing ones
    if (n[2] < -tol) {
      // z = (d - nx x - ny y) / nz, then undo the normalization
      const double A = -n[0] / n[2], B = -n[1] / n[2], C = d / n[2];
      LowerHull2::Plane q;
      q.a = A * scale[2] / scale[0];
      q.b = B * scale[2] / scale[1];
      q.c = lo[2] + scale[2] * (C - A * lo[0] / scale[0] - B * lo[1] / scale[1]);
      out.planes.push_back(q);
    }
  };

  if (best < tol) {  // all points coplanar
    if (std::fabs(n0[2]) < tol)
      throw ArgumentError("lower hull: degenerate vertical point set");
    double d0 = detail::dot(n0, P[i0]);
    if (n0[2] > 0) {  // make it the downward orientation
      for (double& x : n0) x = -x;
      d0 = -d0;
    }
    emit(n0, d0);
    return out;
  }

  // quickhull proper
  std::vector<detail::HFace> faces;
  V3 interior{0, 0, 0};
  for (size_t k : {i0, i1, i2, i3})
    for (int c = 0; c < 3; ++c) interior[c] += P[k][c] / 4.0;
  const int a = (int)i0, b = (int)i1, c = (int)i2, d = (int)i3;
  faces.push_back(detail::make_face(P, a, b, c, interior));
  faces.push_back(detail::make_face(P, a, b, d, interior));
  faces.push_back(detail::make_face(P, a, c, d, interior));
  faces.push_back(detail::make_face(P, b, c, d, interior));
  for (size_t i = 0; i < N; ++i) {
    double bd = tol;
    int bf = -1;
    for (size_t f = 0; f < faces.size(); ++f) {
      const double dd = detail::face_dist(faces[f], P[i]);
      if (dd > bd) {
        bd = dd;
        bf = (int)f;
      }
    }
    if (bf >= 0) faces[bf].outside.push_back((int)i);
  }

  for (;;) {
    int fi = -1;
    for (size_t f = 0; f < faces.size(); ++f)
      if (faces[f].alive && !faces[f].outside.empty()) {
        fi = (int)f;
        break;
      }
    if (fi < 0) break;

    // farthest outside point of that face
    int pi = -1;
    double bd = -1;
    for (int i : faces[fi].outside) {
      const double dd = detail::face_dist(faces[fi], P[i]);
      if (dd > bd) {
        bd = dd;
        pi = i;
      }
    }
    const V3& apex = P[pi];

    // visible faces and the horizon
    std::vector<int> visible;
    for (size_t f = 0; f < faces.size(); ++f)
      if (faces[f].alive && detail::face_dist(faces[f], apex) > tol)
        visible.push_back((int)f);
    std::map<std::pair<int, int>, int> edge_count;
    auto add_edge = [&](int u, int v) {
      const auto key = std::minmax(u, v);
      edge_count[{key.first, key.second}]++;
    };
    for (int f : visible) {
      add_edge(faces[f].a, faces[f].b);
      add_edge(faces[f].b, faces[f].c);
      add_edge(faces[f].c, faces[f].a);
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [e, cnt] : edge_count)
      if (cnt == 1) horizon.push_back(e);

    std::vector<int> orphans;
    for (int f : visible) {
      faces[f].alive = false;
      orphans.insert(orphans.end(), faces[f].outside.begin(), faces[f].outside.end());
      faces[f].outside.clear();
    }
    std::vector<int> born;
    for (const auto& [u, v] : horizon) {
      faces.push_back(detail::make_face(P, u, v, pi, interior));
      born.push_back((int)faces.size() - 1);
    }
    for (int i : orphans) {
      if (i == pi) continue;
      double obd = tol;
      int obf = -1;
      for (int f : born) {
        const double dd = detail::face_dist(faces[f], P[i]);
        if (dd > obd) {
          obd = dd;
          obf = f;
        }
      }
      if (obf >= 0) faces[obf].outside.push_back(i);
    }
  }

  for (const auto& f : faces)
    if (f.alive) emit(f.n, f.d);
  if (out.planes.empty()) throw ArgumentError("lower hull: no downward facets");
  return out;
}

}  // namespace demlab
