#include "liftlab/mesh.hpp"

#include "delaunay.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <cstring>
#include <map>

namespace liftlab {

namespace {

constexpr int kAxisMarker = 100;

using Key = std::pair<int, int>;
Key key(int a, int b) { return a < b ? Key{a, b} : Key{b, a}; }

struct PslgBuilder {
  detail::Pslg g;

  int point(const Vec2& p) {
    g.points.push_back(p);
    return static_cast<int>(g.points.size()) - 1;
  }

  // n equal pieces between existing points ia and ib.
  void line(int ia, int ib, int n, int marker) {
    const Vec2 a = g.points[ia], b = g.points[ib];
    int prev = ia;
    for (int k = 1; k <= n; ++k) {
      const int cur = k == n ? ib : point(a + (b - a) * (static_cast<double>(k) / n));
      g.segments.push_back({prev, cur});
      g.markers.push_back(marker);
      prev = cur;
    }
  }
};

int pieces(double len, double h, int at_least) {
  return std::max(at_least, static_cast<int>(std::ceil(len / h - 1e-9)));
}

// Orients each boundary edge as it appears in its (ccw) triangle, so that
// (dy, -dx) is the outward normal of the domain.
void orient_boundary(Mesh& M) {
  std::map<Key, int> directed;
  for (int t = 0; t < M.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) directed[{M.triangles(i, t), M.triangles((i + 1) % 3, t)}] = t;
  for (int e = 0; e < M.num_boundary_edges(); ++e) {
    const int a = M.boundary_edges(0, e), b = M.boundary_edges(1, e);
    if (!directed.count({a, b})) std::swap(M.boundary_edges(0, e), M.boundary_edges(1, e));
  }
}

Mesh from_triangulation(const detail::Triangulation& tr) {
  Mesh M;
  M.nodes.resize(2, static_cast<Eigen::Index>(tr.points.size()));
  for (std::size_t i = 0; i < tr.points.size(); ++i) M.nodes.col(static_cast<Eigen::Index>(i)) = tr.points[i];
  M.triangles.resize(3, static_cast<Eigen::Index>(tr.triangles.size()));
  for (std::size_t t = 0; t < tr.triangles.size(); ++t)
    for (int i = 0; i < 3; ++i) M.triangles(i, static_cast<Eigen::Index>(t)) = tr.triangles[t][i];
  std::vector<std::array<int, 2>> edges;
  for (std::size_t s = 0; s < tr.segments.size(); ++s) {
    if (tr.markers[s] == kAxisMarker) continue;
    edges.push_back(tr.segments[s]);
    M.boundary_tags.push_back(static_cast<BoundaryTag>(tr.markers[s]));
  }
  M.boundary_edges.resize(2, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    M.boundary_edges(0, static_cast<Eigen::Index>(e)) = edges[e][0];
    M.boundary_edges(1, static_cast<Eigen::Index>(e)) = edges[e][1];
  }
  return M;
}

BoundaryTag mirrored(BoundaryTag t) {
  if (t == BoundaryTag::GammaTop) return BoundaryTag::GammaBottom;
  if (t == BoundaryTag::GammaBottom) return BoundaryTag::GammaTop;
  return t;
}

// Glues the upper-half mesh to its mirror image along x2 = 0.
Mesh mirror_merge(const Mesh& half) {
  const int n = half.num_nodes();
  std::vector<int> image(n);
  int extra = 0;
  for (int i = 0; i < n; ++i) image[i] = half.nodes(1, i) == 0.0 ? i : n + extra++;

  Mesh M;
  M.nodes.resize(2, n + extra);
  M.nodes.leftCols(n) = half.nodes;
  for (int i = 0; i < n; ++i)
    if (image[i] != i) M.nodes.col(image[i]) = Vec2(half.nodes(0, i), -half.nodes(1, i));

  const int nt = half.num_triangles();
  M.triangles.resize(3, 2 * nt);
  M.triangles.leftCols(nt) = half.triangles;
  for (int t = 0; t < nt; ++t)
    M.triangles.col(nt + t) << image[half.triangles(0, t)], image[half.triangles(2, t)], image[half.triangles(1, t)];

  const int nb = half.num_boundary_edges();
  M.boundary_edges.resize(2, 2 * nb);
  M.boundary_edges.leftCols(nb) = half.boundary_edges;
  M.boundary_tags = half.boundary_tags;
  for (int e = 0; e < nb; ++e) {
    M.boundary_edges.col(nb + e) << image[half.boundary_edges(1, e)], image[half.boundary_edges(0, e)];
    M.boundary_tags.push_back(mirrored(half.boundary_tags[e]));
  }
  return M;
}

// Diagonals run corner to corner away from the axis, so the grid is its own mirror image.
Mesh structured(const Rectd& R, double h) {
  const double L = R.half_width, H = R.half_height;
  const int nx = pieces(2 * L, h, 1);
  int ny = pieces(2 * H, h, 2);
  ny += ny % 2;
  Mesh M;
  M.nodes.resize(2, (nx + 1) * (ny + 1));
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      M.nodes.col(id(i, j)) = Vec2(-L + 2 * L * i / nx, (2 * j - ny) * H / ny);
  M.triangles.resize(3, 2 * nx * ny);
  int t = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int p00 = id(i, j), p10 = id(i + 1, j), p01 = id(i, j + 1), p11 = id(i + 1, j + 1);
      if (2 * j >= ny) {
        M.triangles.col(t++) << p00, p10, p11;
        M.triangles.col(t++) << p00, p11, p01;
      } else {
        M.triangles.col(t++) << p00, p10, p01;
        M.triangles.col(t++) << p10, p11, p01;
      }
    }
  }
  std::vector<std::array<int, 2>> edges;
  for (int i = 0; i < nx; ++i) {
    edges.push_back({id(i, 0), id(i + 1, 0)});
    M.boundary_tags.push_back(BoundaryTag::GammaBottom);
  }
  for (int j = 0; j < ny; ++j) {
    edges.push_back({id(nx, j), id(nx, j + 1)});
    M.boundary_tags.push_back(BoundaryTag::GammaRight);
  }
  for (int i = nx; i > 0; --i) {
    edges.push_back({id(i, ny), id(i - 1, ny)});
    M.boundary_tags.push_back(BoundaryTag::GammaTop);
  }
  for (int j = ny; j > 0; --j) {
    edges.push_back({id(0, j), id(0, j - 1)});
    M.boundary_tags.push_back(BoundaryTag::GammaLeft);
  }
  M.boundary_edges.resize(2, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e)
    M.boundary_edges.col(static_cast<Eigen::Index>(e)) << edges[e][0], edges[e][1];
  M.R = R;
  M.h = h;
  M.mirror_symmetric = true;
  return M;
}

// Upper part of a symmetric convex body: from (x_r, 0) counterclockwise to
// (x_l, 0). The flag marks chain points that are original vertices.
std::vector<std::pair<Vec2, bool>> upper_chain(const Body& B) {
  std::vector<std::pair<Vec2, bool>> poly;
  const std::size_t n = B.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = B[i], b = B.vertex(static_cast<std::ptrdiff_t>(i) + 1);
    if (a.y() >= 0) poly.emplace_back(a, true);
    if ((a.y() > 0 && b.y() < 0) || (a.y() < 0 && b.y() > 0)) {
      const double t = -a.y() / (b.y() - a.y());
      poly.emplace_back(Vec2(a.x() + t * (b.x() - a.x()), 0.0), false);
    }
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (poly[i].first.y() == 0 && (poly[start].first.y() != 0 || poly[i].first.x() > poly[start].first.x()))
      start = i;
  std::rotate(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(start), poly.end());
  // The chain ends at the other axis point; what follows would be the axis itself.
  std::size_t end = 1;
  while (end < poly.size() && poly[end].first.y() != 0) ++end;
  if (end >= poly.size()) throw InvalidArgument("mirror meshing: body does not straddle the axis");
  poly.resize(end + 1);
  return poly;
}

void check_body(const Rectd& R, const Body& B, const MeshOptions& opt, double hb) {
  if (!is_convex(B)) throw InvalidArgument("generate_mesh: body is not convex");
  if (clearance(B, R) <= 2 * opt.h)
    throw InvalidArgument("generate_mesh: body must keep a clearance larger than 2h from the channel walls");
  if (hb > diameter(B) / 3) throw InvalidArgument("generate_mesh: h too coarse to resolve the body");
  if (opt.mirror && !is_axis_symmetric(B)) throw InvalidArgument("generate_mesh: mirror mode needs a symmetric body");
}

double ray_hit(const Body& B, const Vec2& c, const Vec2& d) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < B.size(); ++i) {
    const Vec2 q0 = B[i];
    const Vec2 e = B.vertex(static_cast<std::ptrdiff_t>(i) + 1) - q0;
    const double den = cross<double>(d, e);
    if (std::abs(den) < 1e-300) continue;
    const double t = cross<double>(q0 - c, e) / den;
    const double s = cross<double>(q0 - c, d) / den;
    if (t > 0 && s >= -1e-12 && s <= 1 + 1e-12) best = std::min(best, t);
  }
  if (!std::isfinite(best)) throw Error("morph_mesh: ray misses the target body");
  return best;
}

// Arc-length coordinate along a polygon, starting at vertex 0.
struct Perimeter {
  const Body& B;
  std::vector<double> cum;

  explicit Perimeter(const Body& b) : B(b), cum{0} {
    for (std::size_t i = 0; i < B.size(); ++i)
      cum.push_back(cum.back() + (B.vertex(static_cast<std::ptrdiff_t>(i) + 1) - B[i]).norm());
  }
  double total() const { return cum.back(); }
  double param(const Vec2& p) const {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < B.size(); ++i) {
      const double d = segment_distance<double>(p, B[i], B.vertex(static_cast<std::ptrdiff_t>(i) + 1));
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    const double s = cum[best] + (p - B[best]).norm();
    return s >= total() ? s - total() : s;
  }
  Vec2 point(double s) const {
    s = std::fmod(s, total());
    if (s < 0) s += total();
    const auto i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()) - 1;
    const std::size_t k = std::min(i, B.size() - 1);
    const Vec2 a = B[k], b = B.vertex(static_cast<std::ptrdiff_t>(k) + 1);
    const double len = cum[k + 1] - cum[k];
    return len > 0 ? Vec2(a + (s - cum[k]) / len * (b - a)) : a;
  }
};

}  // namespace

std::string_view to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::GammaBottom: return "GammaBottom";
    case BoundaryTag::GammaTop: return "GammaTop";
    case BoundaryTag::GammaLeft: return "GammaLeft";
    case BoundaryTag::GammaRight: return "GammaRight";
    case BoundaryTag::BodyBoundary: return "BodyBoundary";
  }
  return "?";
}

BoundaryTag boundary_tag_from_string(std::string_view s) {
  for (int k = 0; k < kNumBoundaryTags; ++k)
    if (to_string(static_cast<BoundaryTag>(k)) == s) return static_cast<BoundaryTag>(k);
  throw InvalidArgument("unknown boundary tag '" + std::string(s) + "'");
}

Mesh generate_mesh(const Rectd& R, const std::optional<Body>& body, const MeshOptions& opt) {
  const double L = R.half_width, H = R.half_height;
  if (!(L > H && H > 0)) throw InvalidArgument("generate_mesh: rectangle needs L > H > 0");
  if (!(opt.h > 0)) throw InvalidArgument("generate_mesh: h must be positive");
  if (!body) return structured(R, opt.h);

  const Body& B = *body;
  const double h = opt.h;
  const double hb = opt.body_h > 0 ? std::min(opt.body_h, h) : h;
  check_body(R, B, opt, hb);

  PslgBuilder pb;
  const int bottom = static_cast<int>(BoundaryTag::GammaBottom), top = static_cast<int>(BoundaryTag::GammaTop);
  const int left = static_cast<int>(BoundaryTag::GammaLeft), right = static_cast<int>(BoundaryTag::GammaRight);
  const int wall = static_cast<int>(BoundaryTag::BodyBoundary);

  if (!opt.mirror) {
    const int c0 = pb.point({-L, -H}), c1 = pb.point({L, -H}), c2 = pb.point({L, H}), c3 = pb.point({-L, H});
    pb.line(c0, c1, pieces(2 * L, h, 1), bottom);
    pb.line(c1, c2, pieces(2 * H, h, 1), right);
    pb.line(c2, c3, pieces(2 * L, h, 1), top);
    pb.line(c3, c0, pieces(2 * H, h, 1), left);
    std::vector<int> v;
    for (const auto& p : B.vertices()) v.push_back(pb.point(p));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int j = static_cast<int>((i + 1) % v.size());
      pb.line(v[i], v[j], pieces((B[i] - B[j]).norm(), hb, 3), wall);
    }
  } else {
    const auto chain = upper_chain(B);
    const Vec2 xr = chain.front().first, xl = chain.back().first;
    const int a0 = pb.point({-L, 0.0}), a1 = pb.point({L, 0.0}), c2 = pb.point({L, H}), c3 = pb.point({-L, H});
    std::vector<int> v;
    for (const auto& [p, original] : chain) v.push_back(pb.point(p));
    pb.line(a0, v.back(), pieces(xl.x() + L, h, 1), kAxisMarker);
    pb.line(v.front(), a1, pieces(L - xr.x(), h, 1), kAxisMarker);
    pb.line(a1, c2, pieces(H, h, 1), right);
    pb.line(c2, c3, pieces(2 * L, h, 1), top);
    pb.line(c3, a0, pieces(H, h, 1), left);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const bool half_side = !chain[i].second || !chain[i + 1].second;
      pb.line(v[i], v[i + 1], pieces((chain[i].first - chain[i + 1].first).norm(), hb, half_side ? 2 : 3), wall);
    }
  }

  const bool mirror = opt.mirror;
  auto inside = [&](const Vec2& p) {
    if (!(std::abs(p.x()) < L && std::abs(p.y()) < H)) return false;
    if (mirror && !(p.y() > 0)) return false;
    return !contains(B, p);
  };
  detail::RefineOptions ro;
  ro.min_angle_deg = opt.min_angle_deg;
  ro.max_points = opt.max_nodes;
  ro.size = [&](const Vec2& p) {
    if (hb >= h) return h;
    return std::min(h, hb + 0.5 * boundary_distance(B, p));
  };
  Mesh M = from_triangulation(detail::triangulate(pb.g, inside, ro));
  if (mirror) M = mirror_merge(M);
  orient_boundary(M);
  M.R = R;
  M.body = B;
  M.h = h;
  M.mirror_symmetric = mirror;
  return M;
}

Mesh reflect_mesh(const Mesh& M) {
  Mesh out = M;
  out.nodes.row(1) = -M.nodes.row(1);
  out.triangles.row(1) = M.triangles.row(2);
  out.triangles.row(2) = M.triangles.row(1);
  out.boundary_edges.row(0) = M.boundary_edges.row(1);
  out.boundary_edges.row(1) = M.boundary_edges.row(0);
  for (auto& t : out.boundary_tags) t = mirrored(t);
  if (M.body) out.body = reflect_body(*M.body);
  return out;
}

double signed_area(const Mesh& M, int t) {
  const Vec2 a = M.node(M.triangles(0, t)), b = M.node(M.triangles(1, t)), c = M.node(M.triangles(2, t));
  return cross<double>(b - a, c - a) / 2;
}

double boundary_length(const Mesh& M, BoundaryTag tag) {
  double s = 0;
  for (int e = 0; e < M.num_boundary_edges(); ++e)
    if (M.boundary_tags[e] == tag) s += (M.node(M.boundary_edges(1, e)) - M.node(M.boundary_edges(0, e))).norm();
  return s;
}

MeshQuality mesh_quality(const Mesh& M) {
  MeshQuality q;
  q.nodes = M.num_nodes();
  q.triangles = M.num_triangles();
  q.min_angle_deg = 180;
  q.h_min = std::numeric_limits<double>::infinity();
  std::map<Key, int> edges;
  for (int t = 0; t < M.num_triangles(); ++t) {
    std::array<Vec2, 3> p;
    for (int i = 0; i < 3; ++i) p[i] = M.node(M.triangles(i, t));
    std::array<double, 3> len;
    for (int i = 0; i < 3; ++i) {
      len[i] = (p[(i + 1) % 3] - p[(i + 2) % 3]).norm();
      edges[key(M.triangles((i + 1) % 3, t), M.triangles((i + 2) % 3, t))] = 1;
    }
    for (int i = 0; i < 3; ++i) {
      const double a = len[i], b = len[(i + 1) % 3], c = len[(i + 2) % 3];
      const double cosv = std::clamp((b * b + c * c - a * a) / (2 * b * c), -1.0, 1.0);
      q.min_angle_deg = std::min(q.min_angle_deg, std::acos(cosv) * 180 / M_PI);
      q.h_min = std::min(q.h_min, a);
      q.h_max = std::max(q.h_max, a);
    }
    const double area = std::abs(signed_area(M, t));
    const double s = (len[0] + len[1] + len[2]) / 2;
    const double circum = len[0] * len[1] * len[2] / (4 * area);
    const double in = area / s;
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, circum / (2 * in));
  }
  q.edges = static_cast<int>(edges.size());
  for (auto t : M.boundary_tags) ++q.boundary_edges_per_tag[static_cast<int>(t)];
  return q;
}

Report validate_mesh(const Mesh& M) {
  Report rep;
  auto fail = [&](std::string s) { rep.violations.push_back(std::move(s)); };
  const int n = M.num_nodes();
  if (static_cast<int>(M.boundary_tags.size()) != M.num_boundary_edges()) {
    fail("boundary: tag count differs from edge count");
    return rep;
  }
  if (!M.nodes.allFinite()) fail("nodes: non-finite coordinate");
  if ((M.triangles.size() && (M.triangles.minCoeff() < 0 || M.triangles.maxCoeff() >= n)) ||
      (M.boundary_edges.size() && (M.boundary_edges.minCoeff() < 0 || M.boundary_edges.maxCoeff() >= n))) {
    fail("connectivity: node index out of range");
    return rep;
  }
  for (int t = 0; t < M.num_triangles(); ++t) {
    if (!(signed_area(M, t) > 0)) {
      fail("orientation: triangle " + std::to_string(t) + " is not positively oriented");
      break;
    }
  }
  std::map<Key, int> count;
  for (int t = 0; t < M.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) ++count[key(M.triangles(i, t), M.triangles((i + 1) % 3, t))];
  std::map<Key, int> tagged;
  for (int e = 0; e < M.num_boundary_edges(); ++e) {
    const Key k = key(M.boundary_edges(0, e), M.boundary_edges(1, e));
    ++tagged[k];
    const auto it = count.find(k);
    if (it == count.end() || it->second != 1) {
      fail("boundary: tagged edge " + std::to_string(e) + " does not belong to exactly one triangle");
      break;
    }
  }
  for (const auto& [k, c] : count) {
    if (c > 2) {
      fail("connectivity: edge shared by more than two triangles");
      break;
    }
    if (c == 1 && tagged[k] != 1) {
      fail("boundary: untagged or multiply tagged boundary edge");
      break;
    }
  }

  const double L = M.R.half_width, H = M.R.half_height;
  const double tol = 1e-12 * std::max(L, 1.0);
  bool misplaced = false;
  for (int e = 0; e < M.num_boundary_edges() && !misplaced; ++e) {
    for (int j = 0; j < 2; ++j) {
      const Vec2 p = M.node(M.boundary_edges(j, e));
      switch (M.boundary_tags[e]) {
        case BoundaryTag::GammaBottom: misplaced |= std::abs(p.y() + H) > tol; break;
        case BoundaryTag::GammaTop: misplaced |= std::abs(p.y() - H) > tol; break;
        case BoundaryTag::GammaLeft: misplaced |= std::abs(p.x() + L) > tol; break;
        case BoundaryTag::GammaRight: misplaced |= std::abs(p.x() - L) > tol; break;
        case BoundaryTag::BodyBoundary:
          misplaced |= !M.body || boundary_distance(*M.body, p) > 1e-9 * std::max(1.0, diameter(*M.body));
          break;
      }
    }
  }
  if (misplaced) fail("tags: boundary edge lies off its tagged boundary piece");

  double outer = 0;
  for (auto t : {BoundaryTag::GammaBottom, BoundaryTag::GammaTop, BoundaryTag::GammaLeft, BoundaryTag::GammaRight})
    outer += boundary_length(M, t);
  if (std::abs(outer - M.R.perimeter()) > 1e-10 * M.R.perimeter()) fail("tags: outer boundary length mismatch");

  if (M.body) {
    if (boundary_length(M, BoundaryTag::BodyBoundary) <= 0) fail("tags: body present but no BodyBoundary edges");
    const Body& B = *M.body;
    const double margin = 1e-9 * std::max(1.0, diameter(B));
    for (int i = 0; i < n; ++i) {
      const Vec2 p = M.node(i);
      if (contains(B, p) && boundary_distance(B, p) > margin) {
        fail("body: node " + std::to_string(i) + " lies strictly inside the body");
        break;
      }
    }
  } else if (boundary_length(M, BoundaryTag::BodyBoundary) > 0) {
    fail("tags: BodyBoundary edges without a body");
  }
  return rep;
}

Mesh morph_mesh(const Mesh& M, const Body& target, const std::function<Vec2(const Vec2&)>& boundary_map) {
  const int n = M.num_nodes();
  Eigen::Matrix2Xd disp = Eigen::Matrix2Xd::Zero(2, n);
  std::vector<char> fixed(n, 0);
  for (int e = 0; e < M.num_boundary_edges(); ++e) {
    for (int j = 0; j < 2; ++j) {
      const int v = M.boundary_edges(j, e);
      if (fixed[v]) continue;
      fixed[v] = 1;
      if (M.boundary_tags[e] == BoundaryTag::BodyBoundary) disp.col(v) = boundary_map(M.node(v)) - M.node(v);
    }
  }
  std::vector<int> free_id(n, -1);
  int nf = 0;
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) free_id[i] = nf++;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(nf, 2);
  for (int t = 0; t < M.num_triangles(); ++t) {
    Eigen::Matrix<double, 2, 3> g;
    const Vec2 a = M.node(M.triangles(0, t)), b = M.node(M.triangles(1, t)), c = M.node(M.triangles(2, t));
    const double area = signed_area(M, t);
    // Gradients of the barycentric coordinates.
    g.col(0) = Vec2(b.y() - c.y(), c.x() - b.x()) / (2 * area);
    g.col(1) = Vec2(c.y() - a.y(), a.x() - c.x()) / (2 * area);
    g.col(2) = Vec2(a.y() - b.y(), b.x() - a.x()) / (2 * area);
    // Weight 1/area: small elements near the body move almost rigidly.
    const Eigen::Matrix3d K = g.transpose() * g;
    for (int i = 0; i < 3; ++i) {
      const int fi = free_id[M.triangles(i, t)];
      if (fi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int vj = M.triangles(j, t);
        if (free_id[vj] >= 0)
          trip.emplace_back(fi, free_id[vj], K(i, j));
        else
          rhs.row(fi) -= K(i, j) * disp.col(vj).transpose();
      }
    }
  }
  if (nf > 0) {
    Eigen::SparseMatrix<double> A(nf, nf);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("morph_mesh: Laplace factorization failed");
    const Eigen::MatrixX2d x = ldlt.solve(rhs);
    for (int i = 0; i < n; ++i)
      if (free_id[i] >= 0) disp.col(i) = x.row(free_id[i]).transpose();
  }
  Mesh out = M;
  out.nodes += disp;
  for (int t = 0; t < out.num_triangles(); ++t)
    if (!(signed_area(out, t) > 0)) throw Error("morph_mesh: element " + std::to_string(t) + " inverted");
  out.body = target;
  out.mirror_symmetric = false;
  return out;
}

Mesh morph_mesh(const Mesh& M, const Body& target) {
  if (!M.body) throw InvalidArgument("morph_mesh: mesh has no body");
  const Vec2 c = centroid(*M.body);
  if (!contains(target, c) || boundary_distance(target, c) <= 0)
    throw InvalidArgument("morph_mesh: body centroid must lie inside the target");
  return morph_mesh(M, target, [&](const Vec2& p) {
    const Vec2 d = p - c;
    return Vec2(c + ray_hit(target, c, d) * d);
  });
}

std::function<Vec2(const Vec2&)> anchored_boundary_map(const Body& from, const Body& to,
                                                      const std::vector<Vec2>& from_anchors,
                                                      const std::vector<Vec2>& to_anchors) {
  const std::size_t n = from_anchors.size();
  if (n < 2 || to_anchors.size() != n) throw InvalidArgument("anchored_boundary_map: need matching anchor lists");
  auto P = std::make_shared<Perimeter>(from);
  auto Q = std::make_shared<Perimeter>(to);
  const double tol = 1e-9 * std::max(1.0, std::max(diameter(from), diameter(to)));
  std::vector<double> rs, ts;
  for (std::size_t i = 0; i < n; ++i) {
    if (boundary_distance(from, from_anchors[i]) > tol || boundary_distance(to, to_anchors[i]) > tol)
      throw InvalidArgument("anchored_boundary_map: anchor off its body boundary");
    rs.push_back(P->param(from_anchors[i]));
    ts.push_back(Q->param(to_anchors[i]));
  }
  // Arc j runs from anchor j to anchor j+1, counterclockwise on both bodies.
  auto ccw = [](double a, double b, double total) {
    const double d = b - a;
    return d < 0 ? d + total : d;
  };
  std::vector<double> span_r(n), span_t(n);
  double sum_r = 0, sum_t = 0;
  for (std::size_t j = 0; j < n; ++j) {
    span_r[j] = ccw(rs[j], rs[(j + 1) % n], P->total());
    span_t[j] = ccw(ts[j], ts[(j + 1) % n], Q->total());
    if (span_r[j] <= tol || span_t[j] <= tol) throw InvalidArgument("anchored_boundary_map: arc of zero length");
    sum_r += span_r[j];
    sum_t += span_t[j];
  }
  if (std::abs(sum_r - P->total()) > tol || std::abs(sum_t - Q->total()) > tol)
    throw InvalidArgument("anchored_boundary_map: anchors are not in counterclockwise order");
  return [P, Q, rs, ts, span_r, span_t](const Vec2& p) {
    const double s = P->param(p);
    const double total = P->total();
    for (std::size_t j = 0; j < rs.size(); ++j) {
      double off = s - rs[j];
      if (off < 0) off += total;
      if (off <= span_r[j]) return Q->point(ts[j] + off / span_r[j] * span_t[j]);
    }
    return Q->point(ts[0]);
  };
}

std::uint64_t fingerprint(const Mesh& M) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(M.nodes.data(), sizeof(double) * static_cast<std::size_t>(M.nodes.size()));
  mix(M.triangles.data(), sizeof(int) * static_cast<std::size_t>(M.triangles.size()));
  mix(M.boundary_edges.data(), sizeof(int) * static_cast<std::size_t>(M.boundary_edges.size()));
  mix(M.boundary_tags.data(), M.boundary_tags.size());
  return h;
}

}  // namespace liftlab
