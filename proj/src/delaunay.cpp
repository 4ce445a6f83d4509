#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

namespace liftlab::detail {
namespace {

using Real = long double;

Real orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Real abx = Real(b.x()) - a.x(), aby = Real(b.y()) - a.y();
  const Real acx = Real(c.x()) - a.x(), acy = Real(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// > 0 when d is strictly inside the circumcircle of the ccw triangle abc.
Real incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const Real adx = Real(a.x()) - d.x(), ady = Real(a.y()) - d.y();
  const Real bdx = Real(b.x()) - d.x(), bdy = Real(b.y()) - d.y();
  const Real cdx = Real(c.x()) - d.x(), cdy = Real(c.y()) - d.y();
  const Real ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double bx = b.x() - a.x(), by = b.y() - a.y();
  const double cx = c.x() - a.x(), cy = c.y() - a.y();
  const double d = 2 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return {a.x() + (cy * b2 - by * c2) / d, a.y() + (bx * c2 - cx * b2) / d};
}

using Key = std::pair<int, int>;
Key key(int a, int b) { return a < b ? Key{a, b} : Key{b, a}; }

class Cdt {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] is across the edge opposite v[i]
    bool alive = true;
    bool inside = false;
  };

  struct CavityEdge {
    int a, b, outer, owner;
  };

  explicit Cdt(const std::vector<Vec2>& input) {
    Vec2 lo = input.front(), hi = input.front();
    for (const auto& p : input) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 c = (lo + hi) / 2;
    const double m = std::max((hi - lo).maxCoeff(), 1.0);
    pts_ = {c + Vec2(-30 * m, -10 * m), c + Vec2(30 * m, -10 * m), c + Vec2(0, 30 * m)};
    tris_.push_back(Tri{{0, 1, 2}});
    vtri_ = {0, 0, 0};
  }

  int insert(const Vec2& p, int hint) {
    const int t = locate(p, hint, false).first;
    for (int v : tris_[t].v)
      if (pts_[v] == p) return v;
    if (!build_cavity(p, t)) throw Error("triangulate: point lies on a constraint segment");
    return commit(p);
  }

  int hint(int v) const { return vtri_[v]; }

  void recover(int a0, int b0, int marker) {
    std::vector<Key> stack{{a0, b0}};
    while (!stack.empty()) {
      const auto [a, b] = stack.back();
      stack.pop_back();
      if (find_edge(a, b).first >= 0 || find_edge(b, a).first >= 0) {
        if (seg_.emplace(key(a, b), marker).second) seg_order_.push_back(key(a, b));
        continue;
      }
      const int m = insert((pts_[a] + pts_[b]) / 2, vtri_[a]);
      if (m == a || m == b) throw Error("triangulate: segment recovery failed");
      stack.push_back({m, b});
      stack.push_back({a, m});
    }
  }

  void mark_regions(const std::function<bool(const Vec2&)>& inside) {
    std::vector<int> seen(tris_.size(), 0);
    std::vector<int> comp;
    for (int t0 = 0; t0 < static_cast<int>(tris_.size()); ++t0) {
      if (!tris_[t0].alive || seen[t0]) continue;
      comp.clear();
      comp.push_back(t0);
      seen[t0] = 1;
      for (std::size_t k = 0; k < comp.size(); ++k) {
        const Tri& T = tris_[comp[k]];
        for (int i = 0; i < 3; ++i) {
          const int n = T.nb[i];
          if (n < 0 || seen[n] || is_segment(T.v[(i + 1) % 3], T.v[(i + 2) % 3])) continue;
          seen[n] = 1;
          comp.push_back(n);
        }
      }
      const Tri& R = tris_[t0];
      const Vec2 c = (pts_[R.v[0]] + pts_[R.v[1]] + pts_[R.v[2]]) / 3;
      const bool in = inside(c);
      for (int t : comp) tris_[t].inside = in && !touches_super(t);
    }
  }

  void refine(const RefineOptions& opt) {
    const double sin_min = std::sin(opt.min_angle_deg * M_PI / 180);
    for (const auto& k : seg_order_) segq_.push_back(k);
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive && tris_[t].inside) triq_.push_back(t);
    collect_ = true;

    while (true) {
      while (!segq_.empty()) {
        const Key s = segq_.front();
        segq_.pop_front();
        if (is_segment(s.first, s.second) && encroached(s.first, s.second)) split_segment(s.first, s.second);
        check_budget(opt);
      }
      if (triq_.empty()) break;
      const int t = triq_.front();
      triq_.pop_front();
      if (!tris_[t].alive || !tris_[t].inside || !is_bad(t, sin_min, opt.size)) continue;

      const auto& v = tris_[t].v;
      const Vec2 cc = circumcenter(pts_[v[0]], pts_[v[1]], pts_[v[2]]);
      if (!cc.allFinite()) continue;
      const auto [loc, blocked] = locate(cc, t, true);
      if (blocked >= 0) {
        const auto& L = tris_[loc].v;
        split_segment(L[(blocked + 1) % 3], L[(blocked + 2) % 3]);
        if (tris_[t].alive) triq_.push_back(t);
        continue;
      }
      if (!tris_[loc].inside) continue;
      bool duplicate = false;
      for (int w : tris_[loc].v) duplicate = duplicate || pts_[w] == cc;
      if (duplicate || !build_cavity(cc, loc)) continue;

      std::vector<Key> hit;
      for (const auto& e : cav_edges_) {
        if (!is_segment(e.a, e.b)) continue;
        if ((pts_[e.a] - cc).dot(pts_[e.b] - cc) < 0) hit.push_back(key(e.a, e.b));
      }
      if (!hit.empty()) {
        for (const auto& s : hit)
          if (is_segment(s.first, s.second)) split_segment(s.first, s.second);
        if (tris_[t].alive) triq_.push_back(t);
        continue;
      }
      commit(cc);
      check_budget(opt);
    }
  }

  Triangulation extract() const {
    Triangulation out;
    std::vector<int> id(pts_.size(), -1);
    for (const auto& T : tris_)
      if (T.alive && T.inside)
        for (int v : T.v) id[v] = 0;
    for (std::size_t v = 0; v < pts_.size(); ++v) {
      if (id[v] < 0) continue;
      id[v] = static_cast<int>(out.points.size());
      out.points.push_back(pts_[v]);
    }
    for (const auto& T : tris_)
      if (T.alive && T.inside) out.triangles.push_back({id[T.v[0]], id[T.v[1]], id[T.v[2]]});
    for (const auto& [k, marker] : seg_) {
      if (id[k.first] < 0 || id[k.second] < 0) continue;
      out.segments.push_back({id[k.first], id[k.second]});
      out.markers.push_back(marker);
    }
    return out;
  }

 private:
  bool is_segment(int a, int b) const { return seg_.count(key(a, b)) != 0; }

  bool touches_super(int t) const {
    for (int v : tris_[t].v)
      if (v < 3) return true;
    return false;
  }

  void check_budget(const RefineOptions& opt) const {
    if (static_cast<int>(pts_.size()) > opt.max_points + 3)
      throw Error("triangulate: refinement exceeded " + std::to_string(opt.max_points) + " points");
  }

  // Returns (triangle, blocked edge). The edge index is >= 0 only when the
  // walk stopped in front of a constraint segment.
  std::pair<int, int> locate(const Vec2& p, int t, bool respect_segments) const {
    if (t < 0 || !tris_[t].alive) t = first_alive();
    const long limit = 4 * static_cast<long>(tris_.size()) + 64;
    for (long step = 0; step < limit; ++step) {
      const Tri& T = tris_[t];
      int edge = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + step) % 3);
        if (orient(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) < 0) {
          edge = i;
          break;
        }
      }
      if (edge < 0) return {t, -1};
      if (respect_segments && is_segment(T.v[(edge + 1) % 3], T.v[(edge + 2) % 3])) return {t, edge};
      if (T.nb[edge] < 0) throw Error("triangulate: point outside the enclosing triangle");
      t = T.nb[edge];
    }
    for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
      if (!tris_[s].alive) continue;
      const auto& v = tris_[s].v;
      if (orient(pts_[v[0]], pts_[v[1]], p) >= 0 && orient(pts_[v[1]], pts_[v[2]], p) >= 0 &&
          orient(pts_[v[2]], pts_[v[0]], p) >= 0)
        return {s, -1};
    }
    throw Error("triangulate: point location failed");
  }

  int first_alive() const {
    for (int t = static_cast<int>(tris_.size()) - 1; t >= 0; --t)
      if (tris_[t].alive) return t;
    throw Error("triangulate: empty triangulation");
  }

  // Triangle holding the directed edge a->b and the index of that edge.
  std::pair<int, int> find_edge(int a, int b) const {
    const int t0 = vtri_[a];
    for (int dir = 0; dir < 2; ++dir) {
      int t = t0;
      do {
        const Tri& T = tris_[t];
        const int k = T.v[0] == a ? 0 : T.v[1] == a ? 1 : 2;
        if (T.v[(k + 1) % 3] == b) return {t, (k + 2) % 3};
        t = dir == 0 ? T.nb[(k + 2) % 3] : T.nb[(k + 1) % 3];
      } while (t >= 0 && t != t0);
      if (t == t0) break;
    }
    return {-1, -1};
  }

  bool encroached(int a, int b) const {
    for (const auto& [t, i] : {find_edge(a, b), find_edge(b, a)}) {
      if (t < 0 || !tris_[t].inside) continue;
      const Vec2& c = pts_[tris_[t].v[i]];
      if ((pts_[a] - c).dot(pts_[b] - c) < 0) return true;
    }
    return false;
  }

  bool is_bad(int t, double sin_min, const std::function<double(const Vec2&)>& size) const {
    const auto& v = tris_[t].v;
    const Vec2 &p0 = pts_[v[0]], &p1 = pts_[v[1]], &p2 = pts_[v[2]];
    const double a = (p1 - p2).norm(), b = (p2 - p0).norm(), c = (p0 - p1).norm();
    const double twice_area = static_cast<double>(orient(p0, p1, p2));
    const double R = a * b * c / (2 * twice_area);
    if (std::min({a, b, c}) < 2 * R * sin_min) return true;
    return R * std::sqrt(3.0) > size((p0 + p1 + p2) / 3);
  }

  void split_segment(int a, int b) {
    const int marker = seg_.at(key(a, b));
    seg_.erase(key(a, b));
    const Vec2 m = (pts_[a] + pts_[b]) / 2;
    auto [t, i] = find_edge(a, b);
    if (t < 0) throw Error("triangulate: missing segment edge");
    if (orient(pts_[a], pts_[b], m) < 0) t = tris_[t].nb[i];
    if (!build_cavity(m, t)) throw Error("triangulate: segment split failed");
    const int v = commit(m);
    for (const Key& k : {key(a, v), key(v, b)}) {
      seg_.emplace(k, marker);
      if (collect_) segq_.push_back(k);
    }
  }

  bool build_cavity(const Vec2& p, int t0) {
    ++stamp_;
    mark_.resize(tris_.size(), 0);
    cav_.clear();
    std::vector<int> stack{t0};
    mark_[t0] = stamp_;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      cav_.push_back(t);
      const Tri& T = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int n = T.nb[i];
        if (n < 0 || mark_[n] == stamp_ || is_segment(T.v[(i + 1) % 3], T.v[(i + 2) % 3])) continue;
        const auto& w = tris_[n].v;
        if (incircle(pts_[w[0]], pts_[w[1]], pts_[w[2]], p) > 0) {
          mark_[n] = stamp_;
          stack.push_back(n);
        }
      }
    }
    // Drop triangles whose outer edge does not see p, so the cavity stays
    // star-shaped under rounding.
    while (true) {
      cav_edges_.clear();
      std::vector<int> bad;
      for (int t : cav_) {
        const Tri& T = tris_[t];
        for (int i = 0; i < 3; ++i) {
          const int n = T.nb[i];
          if (n >= 0 && mark_[n] == stamp_) continue;
          const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
          cav_edges_.push_back({a, b, n, t});
          if (orient(pts_[a], pts_[b], p) <= 0) bad.push_back(t);
        }
      }
      if (bad.empty()) return true;
      for (int t : bad) {
        if (t == t0) return false;
        mark_[t] = 0;
      }
      ++stamp_;
      const int keep = stamp_;
      std::vector<int> old = std::move(cav_);
      cav_.clear();
      for (int t : old)
        if (mark_[t] != 0) mark_[t] = -1;
      stack.assign(1, t0);
      mark_[t0] = keep;
      while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        cav_.push_back(t);
        for (int n : tris_[t].nb)
          if (n >= 0 && mark_[n] == -1) {
            mark_[n] = keep;
            stack.push_back(n);
          }
      }
      for (int t : old)
        if (mark_[t] == -1) mark_[t] = 0;
    }
  }

  int commit(const Vec2& p) {
    const int v = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vtri_.push_back(-1);
    for (int t : cav_) tris_[t].alive = false;

    std::unordered_map<int, int> starts, ends;
    const int first = static_cast<int>(tris_.size());
    for (const auto& e : cav_edges_) {
      Tri T{{e.a, e.b, v}};
      T.nb[2] = e.outer;
      T.inside = tris_[e.owner].inside;
      const int idx = static_cast<int>(tris_.size());
      if (e.outer >= 0) {
        Tri& O = tris_[e.outer];
        for (int j = 0; j < 3; ++j)
          if (O.v[(j + 1) % 3] == e.b && O.v[(j + 2) % 3] == e.a) O.nb[j] = idx;
      }
      starts[e.a] = idx;
      ends[e.b] = idx;
      tris_.push_back(T);
    }
    for (int idx = first; idx < static_cast<int>(tris_.size()); ++idx) {
      Tri& T = tris_[idx];
      T.nb[0] = starts.at(T.v[1]);
      T.nb[1] = ends.at(T.v[0]);
      for (int w : T.v) vtri_[w] = idx;
      if (collect_ && T.inside) triq_.push_back(idx);
    }
    for (int t : cav_)
      for (int w : tris_[t].v)
        if (!tris_[vtri_[w]].alive) throw Error("triangulate: cavity swallowed a vertex");
    if (collect_)
      for (const auto& e : cav_edges_)
        if (is_segment(e.a, e.b)) segq_.push_back(key(e.a, e.b));
    return v;
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;
  std::map<Key, int> seg_;
  std::vector<Key> seg_order_;

  std::vector<int> mark_;
  int stamp_ = 0;
  std::vector<int> cav_;
  std::vector<CavityEdge> cav_edges_;

  bool collect_ = false;
  std::deque<Key> segq_;
  std::deque<int> triq_;
};

}  // namespace

Triangulation triangulate(const Pslg& g, const std::function<bool(const Vec2&)>& inside, const RefineOptions& opt) {
  if (g.points.size() < 3) throw InvalidArgument("triangulate: need at least 3 points");
  if (g.segments.size() != g.markers.size()) throw InvalidArgument("triangulate: one marker per segment");
  Cdt cdt(g.points);
  std::vector<int> id(g.points.size());
  int hint = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    id[i] = cdt.insert(g.points[i], hint);
    hint = cdt.hint(id[i]);
  }
  for (std::size_t s = 0; s < g.segments.size(); ++s)
    cdt.recover(id[g.segments[s][0]], id[g.segments[s][1]], g.markers[s]);
  cdt.mark_regions(inside);
  cdt.refine(opt);
  return cdt.extract();
}

}  // namespace liftlab::detail
