#include "billiards/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace billiards {

namespace {

// vertex i of the dihedral image: rotation by r, optionally of the reversal
int image_index(int i, int r, bool reversed, int p) {
    const int j = (i + r) % p;
    return reversed ? (p - 1 - j) : j;
}

bool matches_image(const TrajectoryCandidate& a, const TrajectoryCandidate& b, int r,
                   bool reversed, double tol) {
    const int p = a.p();
    for (int i = 0; i < p; ++i) {
        const Vec& av = a.vertices[image_index(i, r, reversed, p)].position;
        if ((av - b.vertices[i].position).norm() > tol)
            return false;
    }
    return true;
}

bool lex_less(const std::vector<BoundaryPoint>& a, const std::vector<BoundaryPoint>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < a[i].position.size(); ++c) {
            const double x = a[i].position[c];
            const double y = b[i].position[c];
            if (x != y)
                return x < y;
        }
    return false;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        parent[b] = a;
    }
};

} // namespace

std::vector<TrajectoryCandidate> dihedral_images(const TrajectoryCandidate& traj) {
    const int p = traj.p();
    std::vector<TrajectoryCandidate> out;
    out.reserve(2 * p);
    for (int rev = 0; rev < 2; ++rev)
        for (int r = 0; r < p; ++r) {
            TrajectoryCandidate img = traj;
            for (int i = 0; i < p; ++i)
                img.vertices[i] = traj.vertices[image_index(i, r, rev == 1, p)];
            out.push_back(std::move(img));
        }
    return out;
}

bool same_orbit(const TrajectoryCandidate& a, const TrajectoryCandidate& b, double tol) {
    if (a.p() != b.p() || a.p() == 0)
        return false;
    for (int rev = 0; rev < 2; ++rev)
        for (int r = 0; r < a.p(); ++r)
            if (matches_image(a, b, r, rev == 1, tol))
                return true;
    return false;
}

std::vector<OrbitClass> dedup(const std::vector<TrajectoryCandidate>& candidates,
                              double tol_dedup, double diameter) {
    const double tol_abs = tol_dedup * diameter;

    std::vector<int> eligible;
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i)
        if (candidates[i].converged && !candidates[i].continuum_suspect)
            eligible.push_back(i);

    std::vector<int> order = eligible;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (candidates[a].perimeter != candidates[b].perimeter)
            return candidates[a].perimeter < candidates[b].perimeter;
        return a < b;
    });

    // pairwise same_orbit within a sliding perimeter window, merged by
    // union-find over original indices
    UnionFind uf(static_cast<int>(candidates.size()));
    for (std::size_t si = 0; si < order.size(); ++si) {
        const int i = order[si];
        for (std::size_t sj = si + 1; sj < order.size(); ++sj) {
            const int j = order[sj];
            if (candidates[j].perimeter - candidates[i].perimeter > 2.0 * tol_abs)
                break;
            if (uf.find(i) != uf.find(j))
                if (same_orbit(candidates[i], candidates[j], tol_abs))
                    uf.unite(i, j);
        }
    }

    std::map<int, std::vector<int>> groups;
    for (int i : eligible)
        groups[uf.find(i)].push_back(i);

    std::vector<OrbitClass> classes;
    classes.reserve(groups.size());
    for (const auto& [root, members] : groups) {
        int best = members.front();
        for (int i : members)
            if (candidates[i].kkt_residual < candidates[best].kkt_residual)
                best = i;

        OrbitClass cls;
        cls.representative = candidates[best];
        for (const auto& img : dihedral_images(candidates[best]))
            if (lex_less(img.vertices, cls.representative.vertices))
                cls.representative.vertices = img.vertices;
        cls.member_count = static_cast<int>(members.size());
        cls.perimeter = cls.representative.perimeter;

        const double q = 1e-6 * diameter;
        auto quantize = [q](double v) { return std::round(v / q) * q; };
        cls.signature.push_back(quantize(cls.perimeter));
        std::vector<double> edges;
        const int p = cls.representative.p();
        for (int i = 0; i < p; ++i)
            edges.push_back((cls.representative.vertices[i].position -
                             cls.representative.vertices[(i + 1) % p].position)
                                .norm());
        std::sort(edges.begin(), edges.end());
        for (double e : edges)
            cls.signature.push_back(quantize(e));
        classes.push_back(std::move(cls));
    }

    std::sort(classes.begin(), classes.end(), [](const OrbitClass& a, const OrbitClass& b) {
        if (a.perimeter != b.perimeter)
            return a.perimeter < b.perimeter;
        if (a.signature != b.signature)
            return a.signature < b.signature;
        return lex_less(a.representative.vertices, b.representative.vertices);
    });
    return classes;
}

} // namespace billiards
