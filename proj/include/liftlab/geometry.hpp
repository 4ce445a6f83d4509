#ifndef LIFTLAB_GEOMETRY_HPP
#define LIFTLAB_GEOMETRY_HPP

// Convex obstacles in the channel: polygons, Hausdorff distance, reflection
// across the channel axis and the area-preserving trapezium homotopy.

#include "liftlab/common.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace liftlab {

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Axis-aligned rectangle (-half_width, half_width) x (-half_height, half_height).
template <typename Scalar>
struct Rect {
  Scalar half_width{};
  Scalar half_height{};

  Scalar area() const { return 4 * half_width * half_height; }
  Scalar perimeter() const { return 4 * (half_width + half_height); }

  bool contains(const Point<Scalar>& p, Scalar tol = 0) const {
    return std::abs(p.x()) <= half_width + tol && std::abs(p.y()) <= half_height + tol;
  }
};

template <typename Scalar>
Scalar cross(const Point<Scalar>& a, const Point<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Scalar signed_area(std::span<const Point<Scalar>> pts) {
  Scalar twice = 0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return twice / 2;
}

/// Closed polygon stored counterclockwise, starting at its lexicographically
/// smallest vertex, with duplicate and collinear vertices removed.
template <typename Scalar>
class BodyShape {
 public:
  using PointType = Point<Scalar>;

  BodyShape() = default;

  explicit BodyShape(std::vector<PointType> pts) : vertices_(canonicalize(std::move(pts))) {}

  const std::vector<PointType>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const PointType& operator[](std::size_t i) const { return vertices_[i]; }
  const PointType& vertex(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(vertices_.size());
    return vertices_[static_cast<std::size_t>(((i % n) + n) % n)];
  }

  friend bool operator==(const BodyShape&, const BodyShape&) = default;

  static Scalar collinear_tolerance(std::span<const PointType> pts) {
    Scalar scale = 0;
    for (const auto& p : pts) scale = std::max({scale, std::abs(p.x()), std::abs(p.y())});
    for (const auto& p : pts)
      for (const auto& q : pts) scale = std::max(scale, (p - q).norm());
    return Scalar(1e-12) * scale * scale;
  }

 private:
  static std::vector<PointType> canonicalize(std::vector<PointType> pts) {
    if (pts.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
    const Scalar tol = collinear_tolerance(pts);
    bool changed = true;
    while (changed && pts.size() >= 3) {
      changed = false;
      for (std::size_t i = 0; i < pts.size() && pts.size() >= 3; ++i) {
        const auto& prev = pts[(i + pts.size() - 1) % pts.size()];
        const auto& next = pts[(i + 1) % pts.size()];
        if (std::abs(cross<Scalar>(pts[i] - prev, next - pts[i])) <= tol) {
          pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }
    if (pts.size() < 3) throw InvalidArgument("polygon is degenerate after removing collinear vertices");
    if (signed_area<Scalar>(pts) < 0) std::reverse(pts.begin(), pts.end());
    auto first = std::min_element(pts.begin(), pts.end(), [](const PointType& a, const PointType& b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    std::rotate(pts.begin(), first, pts.end());
    return pts;
  }

  std::vector<PointType> vertices_;
};

/// Right trapezium [-l,l]x[-h,h] plus the triangle (l,-h),(l,h),(l+gamma,h).
template <typename Scalar>
struct TrapeziumParams {
  Scalar l{};
  Scalar h{};
  Scalar gamma{};
};

/// Admissible body class: convex, inside the centred rectangle D, area alpha.
template <typename Scalar>
struct BodyClass {
  Rect<Scalar> D;
  Scalar alpha{};
  Scalar area_tol = Scalar(1e-9);
};

using Rectd = Rect<double>;
using Body = BodyShape<double>;
using Trapezium = TrapeziumParams<double>;
using BodyClassd = BodyClass<double>;

// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar polygon_area(const BodyShape<Scalar>& b) {
  if (b.size() < 3) throw InvalidArgument("polygon_area: fewer than 3 vertices");
  return signed_area<Scalar>(b.vertices());
}

template <typename Scalar>
Scalar perimeter(const BodyShape<Scalar>& b) {
  Scalar s = 0;
  for (std::size_t i = 0; i < b.size(); ++i) s += (b.vertex(i + 1) - b[i]).norm();
  return s;
}

template <typename Scalar>
Scalar diameter(const BodyShape<Scalar>& b) {
  Scalar d = 0;
  for (const auto& p : b.vertices())
    for (const auto& q : b.vertices()) d = std::max(d, (p - q).norm());
  return d;
}

/// Area centroid.
template <typename Scalar>
Point<Scalar> centroid(const BodyShape<Scalar>& b) {
  Point<Scalar> c = Point<Scalar>::Zero();
  Scalar twice = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& p = b[i];
    const auto& q = b.vertex(static_cast<std::ptrdiff_t>(i) + 1);
    const Scalar w = cross(p, q);
    twice += w;
    c += w * (p + q);
  }
  return c / (3 * twice);
}

template <typename Scalar>
bool is_convex(const BodyShape<Scalar>& b) {
  const Scalar tol = BodyShape<Scalar>::collinear_tolerance(b.vertices());
  const auto n = static_cast<std::ptrdiff_t>(b.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (cross<Scalar>(b.vertex(i) - b.vertex(i - 1), b.vertex(i + 1) - b.vertex(i)) <= tol) return false;
  }
  // A counterclockwise polygon with only left turns can still wind twice.
  Scalar turning = 0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto a = b.vertex(i) - b.vertex(i - 1);
    const auto c = b.vertex(i + 1) - b.vertex(i);
    turning += std::atan2(cross<Scalar>(a, c), a.dot(c));
  }
  return std::abs(turning - 2 * Scalar(M_PI)) < Scalar(1e-6);
}

/// Point-in-convex-polygon test; boundary points count as inside.
template <typename Scalar>
bool contains(const BodyShape<Scalar>& b, const Point<Scalar>& p, Scalar tol = 0) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto e = b.vertex(static_cast<std::ptrdiff_t>(i) + 1) - b[i];
    if (cross<Scalar>(e, p - b[i]) < -tol * e.norm()) return false;
  }
  return true;
}

template <typename Scalar>
Scalar segment_distance(const Point<Scalar>& p, const Point<Scalar>& a, const Point<Scalar>& b) {
  const Point<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  Scalar t = len2 > 0 ? (p - a).dot(ab) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (p - (a + t * ab)).norm();
}

/// Distance from p to the polygon boundary.
template <typename Scalar>
Scalar boundary_distance(const BodyShape<Scalar>& b, const Point<Scalar>& p) {
  Scalar d = std::numeric_limits<Scalar>::max();
  for (std::size_t i = 0; i < b.size(); ++i)
    d = std::min(d, segment_distance(p, b[i], b.vertex(static_cast<std::ptrdiff_t>(i) + 1)));
  return d;
}

/// Distance from p to the filled convex polygon (zero inside).
template <typename Scalar>
Scalar set_distance(const BodyShape<Scalar>& b, const Point<Scalar>& p) {
  return contains(b, p) ? Scalar(0) : boundary_distance(b, p);
}

/// Exact Hausdorff distance between filled convex polygons. The distance to a
/// convex set is a convex function, so each directed sup sits at a vertex.
template <typename Scalar>
Scalar hausdorff_distance(const BodyShape<Scalar>& a, const BodyShape<Scalar>& b) {
  Scalar d = 0;
  for (const auto& p : a.vertices()) d = std::max(d, set_distance(b, p));
  for (const auto& p : b.vertices()) d = std::max(d, set_distance(a, p));
  return d;
}

template <typename Scalar>
BodyShape<Scalar> reflect_body(const BodyShape<Scalar>& b) {
  std::vector<Point<Scalar>> pts;
  pts.reserve(b.size());
  for (const auto& p : b.vertices()) pts.emplace_back(p.x(), -p.y());
  return BodyShape<Scalar>(std::move(pts));
}

template <typename Scalar>
BodyShape<Scalar> translate(const BodyShape<Scalar>& b, const Point<Scalar>& offset) {
  std::vector<Point<Scalar>> pts(b.vertices());
  for (auto& p : pts) p += offset;
  return BodyShape<Scalar>(std::move(pts));
}

/// Uniform scaling about a centre point.
template <typename Scalar>
BodyShape<Scalar> scale_about(const BodyShape<Scalar>& b, const Point<Scalar>& centre, Scalar factor) {
  std::vector<Point<Scalar>> pts(b.vertices());
  for (auto& p : pts) p = centre + factor * (p - centre);
  return BodyShape<Scalar>(std::move(pts));
}

/// True when the two polygons describe the same point set.
template <typename Scalar>
bool same_point_set(const BodyShape<Scalar>& a, const BodyShape<Scalar>& b, Scalar tol) {
  return hausdorff_distance(a, b) <= tol;
}

/// Andrew's monotone chain; throws if the points are all collinear.
template <typename Scalar>
BodyShape<Scalar> convex_hull(std::vector<Point<Scalar>> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point<Scalar>& a, const Point<Scalar>& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw InvalidArgument("convex_hull: fewer than 3 distinct points");
  std::vector<Point<Scalar>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross<Scalar>(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross<Scalar>(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return BodyShape<Scalar>(std::move(hull));
}

/// Sutherland-Hodgman clip of a convex polygon to the centred rectangle.
template <typename Scalar>
BodyShape<Scalar> clip_to_rect(const BodyShape<Scalar>& b, const Rect<Scalar>& r) {
  std::vector<Point<Scalar>> poly(b.vertices());
  auto clip = [&](auto inside, auto intersect) {
    std::vector<Point<Scalar>> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& cur = poly[i];
      const auto& nxt = poly[(i + 1) % poly.size()];
      const bool ci = inside(cur), ni = inside(nxt);
      if (ci) out.push_back(cur);
      if (ci != ni) out.push_back(intersect(cur, nxt));
    }
    poly = std::move(out);
  };
  auto along_x = [](Scalar x0) {
    return [x0](const Point<Scalar>& a, const Point<Scalar>& c) {
      const Scalar t = (x0 - a.x()) / (c.x() - a.x());
      return Point<Scalar>(x0, a.y() + t * (c.y() - a.y()));
    };
  };
  auto along_y = [](Scalar y0) {
    return [y0](const Point<Scalar>& a, const Point<Scalar>& c) {
      const Scalar t = (y0 - a.y()) / (c.y() - a.y());
      return Point<Scalar>(a.x() + t * (c.x() - a.x()), y0);
    };
  };
  clip([&](const Point<Scalar>& p) { return p.x() <= r.half_width; }, along_x(r.half_width));
  clip([&](const Point<Scalar>& p) { return p.x() >= -r.half_width; }, along_x(-r.half_width));
  clip([&](const Point<Scalar>& p) { return p.y() <= r.half_height; }, along_y(r.half_height));
  clip([&](const Point<Scalar>& p) { return p.y() >= -r.half_height; }, along_y(-r.half_height));
  return BodyShape<Scalar>(std::move(poly));
}

/// Smallest distance between the polygon and the boundary of the rectangle;
/// negative when some vertex lies outside.
template <typename Scalar>
Scalar clearance(const BodyShape<Scalar>& b, const Rect<Scalar>& r) {
  Scalar d = std::numeric_limits<Scalar>::max();
  for (const auto& p : b.vertices()) {
    d = std::min({d, r.half_width - std::abs(p.x()), r.half_height - std::abs(p.y())});
  }
  return d;
}

/// True when the polygon is its own mirror image across x2 = 0.
template <typename Scalar>
bool is_axis_symmetric(const BodyShape<Scalar>& b, Scalar tol = Scalar(1e-12)) {
  return hausdorff_distance(b, reflect_body(b)) <= tol * std::max(Scalar(1), diameter(b));
}

template <typename Scalar>
void validate(const TrapeziumParams<Scalar>& p, const Rect<Scalar>& r) {
  if (!(p.h > 0 && p.h < p.l && p.l < r.half_width && p.h < r.half_height && p.gamma > 0 && p.gamma < p.l))
    throw InvalidArgument("trapezium parameters violate 0 < h < l < L, h < H, 0 < gamma < l");
}

/// Corner slots of B_eps before duplicate removal: (-l,-h), (l,-h), lower,
/// upper, (l,h), (-l,h).
template <typename Scalar>
std::array<Point<Scalar>, 6> body_family_slots(Scalar eps, const TrapeziumParams<Scalar>& p) {
  if (!(eps >= 0 && eps <= 1)) throw InvalidArgument("body_family: eps outside [0,1]");
  const Scalar l = p.l, h = p.h, g = p.gamma;
  Point<Scalar> lower, upper;
  if (eps <= Scalar(2) / 3) {
    const Scalar x = l + g / (1 + eps);
    lower = {x, (1 - 2 * eps) * h};
    upper = {x, h};
  } else {
    const Scalar den = 15 * eps - 9 * eps * eps - 1;
    lower = {l + g * (6 * eps - 1) / den, (1 - 2 * eps) * h};
    upper = {l + 9 * g * (1 - eps) / den, h};
  }
  return {Point<Scalar>(-l, -h), Point<Scalar>(l, -h), lower, upper, Point<Scalar>(l, h), Point<Scalar>(-l, h)};
}

/// Area-preserving homotopy from the right trapezium (eps = 0) to its mirror
/// image (eps = 1). The moving corner follows a right trapezium up to
/// eps = 2/3 and a quadrilateral afterwards; both carry area h*gamma.
template <typename Scalar>
BodyShape<Scalar> body_family(Scalar eps, const TrapeziumParams<Scalar>& p) {
  const auto s = body_family_slots(eps, p);
  return BodyShape<Scalar>(std::vector<Point<Scalar>>(s.begin(), s.end()));
}

template <typename Scalar>
BodyShape<Scalar> trapezium(const TrapeziumParams<Scalar>& p) {
  return body_family(Scalar(0), p);
}

template <typename Scalar>
BodyShape<Scalar> centered_rectangle(Scalar half_width, Scalar half_height) {
  return BodyShape<Scalar>({{-half_width, -half_height}, {half_width, -half_height},
                            {half_width, half_height}, {-half_width, half_height}});
}

template <typename Scalar>
void validate(const BodyClass<Scalar>& c, const Rect<Scalar>& r) {
  if (!(c.alpha > 0 && c.alpha < c.D.area())) throw InvalidArgument("body class requires 0 < alpha < |D|");
  if (!(c.D.half_width < r.half_width && c.D.half_height < r.half_height))
    throw InvalidArgument("body class rectangle D must lie strictly inside R");
  if (!(c.area_tol > 0)) throw InvalidArgument("body class area_tol must be positive");
}

template <typename Scalar>
Report is_admissible_body(const BodyShape<Scalar>& b, const BodyClass<Scalar>& c) {
  Report rep;
  if (b.size() < 3) {
    rep.violations.push_back("degenerate: fewer than 3 vertices");
    return rep;
  }
  if (!is_convex(b)) rep.violations.push_back("convexity: polygon is not convex");
  for (const auto& v : b.vertices()) {
    if (!c.D.contains(v)) {
      rep.violations.push_back("containment: vertex outside D");
      break;
    }
  }
  const Scalar area = polygon_area(b);
  if (std::abs(area - c.alpha) > c.area_tol * c.alpha)
    rep.violations.push_back("area: |B| = " + std::to_string(area) + " differs from alpha = " + std::to_string(c.alpha));
  return rep;
}

}  // namespace liftlab

#endif  // LIFTLAB_GEOMETRY_HPP
