#include "orbinspect/quickhull.hpp"

#include "orbinspect/errors.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace orbinspect::geometry {
namespace {

constexpr int kNone = -1;

struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> adj{kNone, kNone, kNone};  // adj[k] shares edge v[k] -> v[k+1]
    Vec3 normal = Vec3::Zero();
    double offset = 0.0;
    std::vector<int> outside;
    int farthest = kNone;
    double farthest_dist = 0.0;
    int visit = -1;
    bool visible = false;
    bool alive = true;
};

enum class Degeneracy { None, Point, Line, Plane };

struct Simplex {
    Degeneracy kind = Degeneracy::None;
    std::array<int, 4> idx{};
};

double distance_to_line(const Vec3& p, const Vec3& a, const Vec3& dir) {
    return (p - a).cross(dir).norm();
}

Simplex initial_simplex(std::span<const Vec3> pts, double eps) {
    Simplex s;
    const int n = static_cast<int>(pts.size());

    std::array<int, 6> ext{0, 0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) {
            if (pts[i][a] < pts[ext[2 * a]][a]) ext[2 * a] = i;
            if (pts[i][a] > pts[ext[2 * a + 1]][a]) ext[2 * a + 1] = i;
        }
    }
    double best = -1.0;
    for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
            const double d = (pts[ext[a]] - pts[ext[b]]).squaredNorm();
            if (d > best) {
                best = d;
                s.idx[0] = ext[a];
                s.idx[1] = ext[b];
            }
        }
    }
    if (std::sqrt(best) <= eps) {
        s.kind = Degeneracy::Point;
        return s;
    }

    const Vec3 a = pts[s.idx[0]];
    const Vec3 dir = (pts[s.idx[1]] - a).normalized();
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = distance_to_line(pts[i], a, dir);
        if (d > best) {
            best = d;
            s.idx[2] = i;
        }
    }
    if (best <= eps) {
        s.kind = Degeneracy::Line;
        return s;
    }

    const Vec3 normal = (pts[s.idx[1]] - a).cross(pts[s.idx[2]] - a).normalized();
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(normal.dot(pts[i] - a));
        if (d > best) {
            best = d;
            s.idx[3] = i;
        }
    }
    if (best <= eps) s.kind = Degeneracy::Plane;
    return s;
}

class Builder {
public:
    Builder(std::span<const Vec3> pts, double eps) : pts_(pts), eps_(eps) {}

    ConvexHull run(const Simplex& simplex) {
        seed(simplex);
        while (true) {
            const int f = next_face();
            if (f == kNone) break;
            expand(f);
        }
        return collect();
    }

private:
    double dist(const Face& f, int p) const { return f.normal.dot(pts_[p]) - f.offset; }

    int add_face(int a, int b, int c) {
        Face f;
        f.v = {a, b, c};
        const Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
        f.normal = n.normalized();
        f.offset = f.normal.dot(pts_[a]);
        faces_.push_back(std::move(f));
        return static_cast<int>(faces_.size()) - 1;
    }

    void assign(int point, const std::vector<int>& candidates) {
        for (int fi : candidates) {
            Face& f = faces_[fi];
            const double d = dist(f, point);
            if (d > eps_) {
                f.outside.push_back(point);
                if (f.farthest == kNone || d > f.farthest_dist) {
                    f.farthest = point;
                    f.farthest_dist = d;
                }
                return;
            }
        }
    }

    void link_all(const std::vector<int>& ids) {
        std::unordered_map<long long, std::pair<int, int>> edges;
        auto key = [](int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); };
        for (int fi : ids) {
            for (int k = 0; k < 3; ++k) edges[key(faces_[fi].v[k], faces_[fi].v[(k + 1) % 3])] = {fi, k};
        }
        for (int fi : ids) {
            for (int k = 0; k < 3; ++k) {
                const auto it = edges.find(key(faces_[fi].v[(k + 1) % 3], faces_[fi].v[k]));
                faces_[fi].adj[k] = it->second.first;
            }
        }
    }

    void seed(const Simplex& s) {
        const auto [a, b, c, d] = s.idx;
        const Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
        std::vector<int> ids;
        if (n.dot(pts_[d] - pts_[a]) < 0.0) {
            ids = {add_face(a, b, c), add_face(a, d, b), add_face(b, d, c), add_face(c, d, a)};
        } else {
            ids = {add_face(a, c, b), add_face(a, b, d), add_face(b, c, d), add_face(c, a, d)};
        }
        link_all(ids);
        const int n_pts = static_cast<int>(pts_.size());
        for (int i = 0; i < n_pts; ++i) {
            if (i == a || i == b || i == c || i == d) continue;
            assign(i, ids);
        }
    }

    int next_face() {
        while (cursor_ < faces_.size()) {
            const Face& f = faces_[cursor_];
            if (f.alive && !f.outside.empty()) return static_cast<int>(cursor_);
            ++cursor_;
        }
        return kNone;
    }

    void expand(int start) {
        const int eye = faces_[start].farthest;
        const int visit = ++visit_counter_;

        std::vector<int> visible{start};
        faces_[start].visit = visit;
        faces_[start].visible = true;
        struct HorizonEdge {
            int a, b, neighbor;
        };
        std::vector<HorizonEdge> horizon;
        for (std::size_t qi = 0; qi < visible.size(); ++qi) {
            const int fi = visible[qi];
            for (int k = 0; k < 3; ++k) {
                const int nb = faces_[fi].adj[k];
                Face& nf = faces_[nb];
                if (nf.visit != visit) {
                    nf.visit = visit;
                    nf.visible = dist(nf, eye) > eps_;
                    if (nf.visible) visible.push_back(nb);
                }
                if (!nf.visible) horizon.push_back({faces_[fi].v[k], faces_[fi].v[(k + 1) % 3], nb});
            }
        }

        // The horizon must be a simple loop; anything else is numerical noise
        // around the eye point, which is then dropped.
        std::unordered_map<int, std::size_t> by_start;
        bool simple = true;
        for (std::size_t h = 0; h < horizon.size(); ++h) {
            if (!by_start.emplace(horizon[h].a, h).second) simple = false;
        }
        if (!simple) {
            auto& out = faces_[start].outside;
            out.erase(std::remove(out.begin(), out.end(), eye), out.end());
            refresh_farthest(faces_[start]);
            for (int fi : visible) faces_[fi].visible = false;
            return;
        }

        std::vector<int> orphans;
        for (int fi : visible) {
            Face& f = faces_[fi];
            f.alive = false;
            for (int p : f.outside) {
                if (p != eye) orphans.push_back(p);
            }
            f.outside.clear();
            f.outside.shrink_to_fit();
        }

        std::vector<int> created(horizon.size());
        for (std::size_t h = 0; h < horizon.size(); ++h) {
            created[h] = add_face(horizon[h].a, horizon[h].b, eye);
        }
        for (std::size_t h = 0; h < horizon.size(); ++h) {
            const HorizonEdge& e = horizon[h];
            Face& nf = faces_[e.neighbor];
            for (int k = 0; k < 3; ++k) {
                if (nf.v[k] == e.b && nf.v[(k + 1) % 3] == e.a) nf.adj[k] = created[h];
            }
            Face& f = faces_[created[h]];
            f.adj[0] = e.neighbor;
            f.adj[1] = created[by_start.at(e.b)];
            std::size_t prev = h;
            for (std::size_t g = 0; g < horizon.size(); ++g) {
                if (horizon[g].b == e.a) prev = g;
            }
            f.adj[2] = created[prev];
        }
        for (int p : orphans) assign(p, created);
    }

    void refresh_farthest(Face& f) const {
        f.farthest = kNone;
        f.farthest_dist = 0.0;
        for (int p : f.outside) {
            const double d = dist(f, p);
            if (f.farthest == kNone || d > f.farthest_dist) {
                f.farthest = p;
                f.farthest_dist = d;
            }
        }
    }

    ConvexHull collect() const {
        ConvexHull hull;
        std::vector<char> used(pts_.size(), 0);
        for (const Face& f : faces_) {
            if (!f.alive) continue;
            hull.faces.push_back({static_cast<std::size_t>(f.v[0]), static_cast<std::size_t>(f.v[1]),
                                  static_cast<std::size_t>(f.v[2])});
            for (int v : f.v) used[v] = 1;
        }
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (used[i]) hull.vertices.push_back(i);
        }
        return hull;
    }

    std::span<const Vec3> pts_;
    double eps_;
    std::vector<Face> faces_;
    std::size_t cursor_ = 0;
    int visit_counter_ = 0;
};

// Andrew's monotone chain on points projected into the plane (u, w).
std::vector<std::size_t> planar_hull(std::span<const Vec3> pts, const Vec3& origin, const Vec3& u,
                                     const Vec3& w, double eps) {
    struct P2 {
        double x, y;
        std::size_t i;
    };
    std::vector<P2> q;
    q.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3 d = pts[i] - origin;
        q.push_back({d.dot(u), d.dot(w), i});
    }
    std::sort(q.begin(), q.end(), [](const P2& a, const P2& b) {
        return a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && a.i < b.i)));
    });
    auto cross = [](const P2& o, const P2& a, const P2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    // Turn test scaled by edge length so eps stays a distance.
    auto left_turn = [&](const P2& o, const P2& a, const P2& b) {
        const double len = std::hypot(b.x - o.x, b.y - o.y);
        return cross(o, a, b) > eps * len;
    };
    std::vector<P2> chain;
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t base = chain.size();
        for (const P2& p : q) {
            while (chain.size() >= base + 2 && !left_turn(chain[chain.size() - 2], chain.back(), p)) chain.pop_back();
            chain.push_back(p);
        }
        chain.pop_back();
        std::reverse(q.begin(), q.end());
    }
    std::vector<std::size_t> out;
    for (const P2& p : chain) out.push_back(p.i);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

double default_hull_epsilon(std::span<const Vec3> points) {
    if (points.empty()) return 0.0;
    Vec3 lo = points[0];
    Vec3 hi = points[0];
    for (const Vec3& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return 1e-9 * (hi - lo).norm();
}

ConvexHull quickhull(std::span<const Vec3> points, double epsilon) {
    if (points.size() < 4) throw HullDegenerate("quickhull needs at least four points");
    const double eps = epsilon < 0.0 ? default_hull_epsilon(points) : epsilon;
    const Simplex s = initial_simplex(points, eps);
    switch (s.kind) {
        case Degeneracy::Point: throw HullDegenerate("all points coincide");
        case Degeneracy::Line: throw HullDegenerate("all points are collinear");
        case Degeneracy::Plane: throw HullDegenerate("all points are coplanar");
        case Degeneracy::None: break;
    }
    return Builder(points, eps).run(s);
}

std::vector<std::size_t> hull_vertex_indices(std::span<const Vec3> points, double epsilon) {
    if (points.empty()) return {};
    const double eps = epsilon < 0.0 ? default_hull_epsilon(points) : epsilon;
    if (points.size() == 1) return {0};

    const Simplex s = points.size() >= 4 ? initial_simplex(points, eps) : [&] {
        Simplex t = initial_simplex(points, eps);
        if (t.kind == Degeneracy::None) t.kind = Degeneracy::Plane;
        return t;
    }();

    switch (s.kind) {
        case Degeneracy::None: return Builder(points, eps).run(s).vertices;
        case Degeneracy::Point: return {static_cast<std::size_t>(s.idx[0])};
        case Degeneracy::Line: {
            std::vector<std::size_t> ends{static_cast<std::size_t>(s.idx[0]), static_cast<std::size_t>(s.idx[1])};
            std::sort(ends.begin(), ends.end());
            return ends;
        }
        case Degeneracy::Plane: {
            const Vec3 a = points[s.idx[0]];
            const Vec3 u = (points[s.idx[1]] - a).normalized();
            const Vec3 n = u.cross(points[s.idx[2]] - a).normalized();
            return planar_hull(points, a, u, n.cross(u), eps);
        }
    }
    return {};
}

}  // namespace orbinspect::geometry
