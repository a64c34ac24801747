#include "twistmodel/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <utility>

namespace twistmodel {

namespace {

// Points closer than this to a facet plane count as on it.
constexpr double kPlaneEps = 1e-9;
// Input clouds thinner than this in any independent direction are rejected.
constexpr double kDegenerateEps = 1e-6;

struct Face {
    std::array<int, 3> v{};       // input indices, counter-clockwise from outside
    Eigen::Vector3d normal{0, 0, 0};  // unit, outward
    double offset = 0.0;              // plane: normal . x = offset
    std::vector<int> outside;         // conflict points (indices), ascending
    int furthest = -1;
    double furthest_dist = 0.0;
    bool alive = true;
};

double signed_dist(const Face& f, const Eigen::Vector3d& p) {
    return f.normal.dot(p) - f.offset;
}

class QuickHull {
public:
    explicit QuickHull(std::span<const Eigen::Vector3d> points) : pts_(points) {}

    Hull3D run() {
        build_initial_simplex();
        assign_initial_conflicts();
        while (!queue_.empty()) {
            int fid = queue_.front();
            queue_.pop_front();
            if (!faces_[fid].alive || faces_[fid].outside.empty()) continue;
            expand(fid);
        }
        return finalize();
    }

private:
    std::span<const Eigen::Vector3d> pts_;
    std::vector<Face> faces_;
    std::map<std::pair<int, int>, int> edge_owner_;  // directed edge -> face id
    std::deque<int> queue_;

    void add_face(int a, int b, int c) {
        Face f;
        f.v = {a, b, c};
        Eigen::Vector3d n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
        double len = n.norm();
        if (len < 1e-30) throw DegenerateInputError("convex_hull_3d: degenerate facet");
        f.normal = n / len;
        f.offset = f.normal.dot(pts_[a]);
        int id = static_cast<int>(faces_.size());
        faces_.push_back(std::move(f));
        edge_owner_[{a, b}] = id;
        edge_owner_[{b, c}] = id;
        edge_owner_[{c, a}] = id;
    }

    void drop_face(int id) {
        Face& f = faces_[id];
        f.alive = false;
        edge_owner_.erase({f.v[0], f.v[1]});
        edge_owner_.erase({f.v[1], f.v[2]});
        edge_owner_.erase({f.v[2], f.v[0]});
    }

    int neighbor_across(int a, int b) const {
        auto it = edge_owner_.find({b, a});
        return it == edge_owner_.end() ? -1 : it->second;
    }

    void build_initial_simplex() {
        const int n = static_cast<int>(pts_.size());
        if (n < 4) throw DegenerateInputError("convex_hull_3d: need at least 4 points");
        for (const auto& p : pts_)
            if (!p.allFinite()) throw DegenerateInputError("convex_hull_3d: non-finite point");

        int i0 = 0;
        for (int i = 1; i < n; ++i)
            if (pts_[i].x() < pts_[i0].x()) i0 = i;

        auto farthest = [&](auto&& dist) {
            int best = -1;
            double best_d = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = dist(i);
                if (d > best_d) {
                    best_d = d;
                    best = i;
                }
            }
            return std::pair<int, double>(best, best_d);
        };

        auto [i1, d1] = farthest([&](int i) { return (pts_[i] - pts_[i0]).norm(); });
        if (d1 <= kDegenerateEps)
            throw DegenerateInputError("convex_hull_3d: points coincide");

        Eigen::Vector3d axis = (pts_[i1] - pts_[i0]).normalized();
        auto [i2, d2] = farthest([&](int i) {
            Eigen::Vector3d d = pts_[i] - pts_[i0];
            return (d - axis.dot(d) * axis).norm();
        });
        if (d2 <= kDegenerateEps)
            throw DegenerateInputError("convex_hull_3d: points are collinear");

        Eigen::Vector3d plane_n =
            (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
        auto [i3, d3] = farthest(
            [&](int i) { return std::abs(plane_n.dot(pts_[i] - pts_[i0])); });
        if (d3 <= kDegenerateEps)
            throw DegenerateInputError("convex_hull_3d: points are coplanar");

        Eigen::Vector3d centroid =
            0.25 * (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]);
        auto add_oriented = [&](int a, int b, int c) {
            Eigen::Vector3d nrm = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
            if (nrm.dot(centroid - pts_[a]) > 0.0)
                add_face(a, c, b);
            else
                add_face(a, b, c);
        };
        add_oriented(i0, i1, i2);
        add_oriented(i0, i1, i3);
        add_oriented(i0, i2, i3);
        add_oriented(i1, i2, i3);
    }

    void attach_point(int pi, const std::vector<int>& face_ids) {
        for (int fid : face_ids) {
            Face& f = faces_[fid];
            if (!f.alive) continue;
            double d = signed_dist(f, pts_[pi]);
            if (d > kPlaneEps) {
                f.outside.push_back(pi);
                if (d > f.furthest_dist) {  // strict: ties keep the lower index
                    f.furthest_dist = d;
                    f.furthest = pi;
                }
                return;
            }
        }
    }

    void assign_initial_conflicts() {
        std::vector<int> ids = {0, 1, 2, 3};
        for (int i = 0; i < static_cast<int>(pts_.size()); ++i) attach_point(i, ids);
        for (int fid : ids)
            if (!faces_[fid].outside.empty()) queue_.push_back(fid);
    }

    void expand(int start_fid) {
        const int apex = faces_[start_fid].furthest;
        const Eigen::Vector3d& p = pts_[apex];

        // Visible set by flood fill across edges.
        std::vector<int> visible = {start_fid};
        std::vector<char> seen(faces_.size(), 0);
        seen[start_fid] = 1;
        std::vector<std::pair<int, int>> horizon;  // directed edges (u, v)
        for (size_t k = 0; k < visible.size(); ++k) {
            const Face f = faces_[visible[k]];
            for (int e = 0; e < 3; ++e) {
                int u = f.v[e], v = f.v[(e + 1) % 3];
                int nb = neighbor_across(u, v);
                if (nb < 0) continue;
                if (seen[nb]) continue;
                if (signed_dist(faces_[nb], p) > kPlaneEps) {
                    seen[nb] = 1;
                    visible.push_back(nb);
                } else {
                    horizon.emplace_back(u, v);
                }
            }
        }

        std::vector<int> orphans;
        for (int fid : visible) {
            for (int pi : faces_[fid].outside)
                if (pi != apex) orphans.push_back(pi);
            drop_face(fid);
        }
        std::sort(orphans.begin(), orphans.end());

        std::vector<int> created;
        created.reserve(horizon.size());
        for (auto [u, v] : horizon) {
            created.push_back(static_cast<int>(faces_.size()));
            add_face(u, v, apex);
        }
        for (int pi : orphans) attach_point(pi, created);
        for (int fid : created)
            if (!faces_[fid].outside.empty()) queue_.push_back(fid);
    }

    Hull3D finalize() const {
        std::vector<int> used;
        for (const Face& f : faces_)
            if (f.alive) used.insert(used.end(), f.v.begin(), f.v.end());
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());

        std::map<int, int> remap;
        Hull3D hull;
        hull.vertices.reserve(used.size());
        for (int idx : used) {
            remap[idx] = static_cast<int>(hull.vertices.size());
            hull.vertices.push_back(pts_[idx]);
        }
        for (const Face& f : faces_) {
            if (!f.alive) continue;
            std::array<int, 3> tri = {remap.at(f.v[0]), remap.at(f.v[1]), remap.at(f.v[2])};
            int lo = 0;
            for (int i = 1; i < 3; ++i)
                if (tri[i] < tri[lo]) lo = i;
            hull.facets.push_back({tri[lo], tri[(lo + 1) % 3], tri[(lo + 2) % 3]});
        }
        std::sort(hull.facets.begin(), hull.facets.end());
        return hull;
    }
};

}  // namespace

Hull3D convex_hull_3d(std::span<const Eigen::Vector3d> points) {
    return QuickHull(points).run();
}

double hull_volume(const Hull3D& hull) {
    if (hull.vertices.empty() || hull.facets.empty())
        throw DegenerateInputError("hull_volume: empty hull");
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& v : hull.vertices) centroid += v;
    centroid /= static_cast<double>(hull.vertices.size());

    double volume = 0.0;
    for (const auto& f : hull.facets) {
        Eigen::Vector3d a = hull.vertices[f[0]] - centroid;
        Eigen::Vector3d b = hull.vertices[f[1]] - centroid;
        Eigen::Vector3d c = hull.vertices[f[2]] - centroid;
        volume += a.dot(b.cross(c)) / 6.0;
    }
    return volume;
}

}  // namespace twistmodel
