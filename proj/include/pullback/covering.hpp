#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "pullback/metric_ops.hpp"
#include "pullback/state.hpp"

namespace pullback {

namespace detail {

/// Minimum enclosing ball in raw (unweighted) coordinates. Welzl's recursion
/// with a deterministic point order; support sets are solved through the
/// circumsphere normal equations.
struct Ball {
    std::vector<double> center;
    double radius = 0.0;

    bool contains(const StatePoint& p, double slack) const {
        double s = 0.0;
        for (std::size_t d = 0; d < center.size(); ++d) {
            const double v = p.coords[d] - center[d];
            s += v * v;
        }
        return s <= (radius + slack) * (radius + slack);
    }
};

inline Ball circumsphere(const std::vector<const StatePoint*>& support, std::size_t dim) {
    Ball b;
    b.center.assign(dim, 0.0);
    if (support.empty()) return b;
    const StatePoint& p0 = *support[0];
    if (support.size() == 1) {
        b.center = p0.coords;
        return b;
    }
    const std::size_t m = support.size() - 1;
    // Gram system: 2 (p_i - p_0) . (c - p_0) = |p_i - p_0|^2.
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    std::vector<std::vector<double>> V(m, std::vector<double>(dim));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t d = 0; d < dim; ++d)
            V[i][d] = support[i + 1]->coords[d] - p0.coords[d];
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t d = 0; d < dim; ++d) dot += V[i][d] * V[j][d];
            A[i][j] = 2.0 * dot;
        }
        double nn = 0.0;
        for (std::size_t d = 0; d < dim; ++d) nn += V[i][d] * V[i][d];
        A[i][m] = nn;
    }
    // Gaussian elimination with partial pivoting; near-singular rows dropped.
    std::vector<double> x(m, 0.0);
    std::vector<std::size_t> rows(m);
    for (std::size_t i = 0; i < m; ++i) rows[i] = i;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m && rank < m; ++col) {
        std::size_t piv = rank;
        for (std::size_t r = rank + 1; r < m; ++r)
            if (std::abs(A[rows[r]][col]) > std::abs(A[rows[piv]][col])) piv = r;
        if (std::abs(A[rows[piv]][col]) < 1e-12) continue;
        std::swap(rows[rank], rows[piv]);
        for (std::size_t r = rank + 1; r < m; ++r) {
            const double f = A[rows[r]][col] / A[rows[rank]][col];
            for (std::size_t c = col; c <= m; ++c) A[rows[r]][c] -= f * A[rows[rank]][c];
        }
        ++rank;
    }
    for (std::size_t i = rank; i-- > 0;) {
        std::size_t lead = 0;
        while (lead < m && std::abs(A[rows[i]][lead]) < 1e-12) ++lead;
        if (lead == m) continue;
        double v = A[rows[i]][m];
        for (std::size_t c = lead + 1; c < m; ++c) v -= A[rows[i]][c] * x[c];
        x[lead] = v / A[rows[i]][lead];
    }
    b.center = p0.coords;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t d = 0; d < dim; ++d) b.center[d] += x[i] * V[i][d];
    double r2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double v = b.center[d] - p0.coords[d];
        r2 += v * v;
    }
    b.radius = std::sqrt(r2);
    return b;
}

inline Ball welzl(std::vector<const StatePoint*>& pts, std::vector<const StatePoint*>& support,
                  std::size_t n, std::size_t dim) {
    if (n == 0 || support.size() == dim + 1) return circumsphere(support, dim);
    Ball b = welzl(pts, support, n - 1, dim);
    const StatePoint* p = pts[n - 1];
    if (b.contains(*p, 1e-10 * (1.0 + b.radius))) return b;
    support.push_back(p);
    b = welzl(pts, support, n - 1, dim);
    support.pop_back();
    // Move-to-front keeps the recursion shallow on adversarial orders.
    for (std::size_t i = n - 1; i > 0; --i) pts[i] = pts[i - 1];
    pts[0] = p;
    return b;
}

inline Ball min_enclosing_ball(const std::vector<const StatePoint*>& points, std::size_t dim) {
    std::vector<const StatePoint*> pts(points);
    std::vector<const StatePoint*> support;
    Ball b = welzl(pts, support, pts.size(), dim);
    // Final inflation so every point is inside despite roundoff.
    double r = b.radius;
    for (const auto* p : points) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double v = p->coords[d] - b.center[d];
            s += v * v;
        }
        r = std::max(r, std::sqrt(s));
    }
    b.radius = r;
    return b;
}

/// Farthest-point-first ordering, lexicographic tie-breaking; `start` picks
/// the index (in lex order) of the first center, which gives deterministic
/// alternative seedings for the local search below.
inline std::vector<std::size_t> fps_order(const SampledSet& A, const Metric& m,
                                          std::size_t start_rank) {
    const auto& pts = A.points;
    std::vector<std::size_t> lex(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) lex[i] = i;
    std::sort(lex.begin(), lex.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].lex_less(pts[b])) return true;
        if (pts[b].lex_less(pts[a])) return false;
        return a < b;
    });
    std::vector<std::size_t> order;
    std::vector<double> min_dist(pts.size(), std::numeric_limits<double>::infinity());
    std::size_t first = lex[std::min(start_rank, pts.size() - 1)];
    order.push_back(first);
    for (std::size_t i = 0; i < pts.size(); ++i) min_dist[i] = m(pts[i], pts[first]);
    while (order.size() < pts.size()) {
        std::size_t pick = pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (min_dist[i] <= 0.0) continue;
            if (pick == pts.size() || min_dist[i] > min_dist[pick] ||
                (min_dist[i] == min_dist[pick] && pts[i].lex_less(pts[pick])))
                pick = i;
        }
        if (pick == pts.size()) break;  // remaining points duplicate the centers
        order.push_back(pick);
        for (std::size_t i = 0; i < pts.size(); ++i)
            min_dist[i] = std::min(min_dist[i], m(pts[i], pts[pick]));
    }
    return order;
}

struct KCenterSolution {
    double radius = std::numeric_limits<double>::infinity();  // raw coordinates
    std::vector<StatePoint> centers;
};

inline double raw_dist(const StatePoint& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.dim(); ++d) {
        const double v = a.coords[d] - c[d];
        s += v * v;
    }
    return std::sqrt(s);
}

/// Minimax k-clustering: nearest-center assignment, exact enclosing-ball
/// recentering, then single-point swap descent. Deterministic throughout.
inline KCenterSolution lloyd_minimax(const SampledSet& A,
                                     std::vector<std::vector<double>> centers) {
    const std::size_t n = A.size();
    const std::size_t k = centers.size();
    const std::size_t dim = A.dim();
    std::vector<std::size_t> assign(n, 0);

    auto reassign = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double d = raw_dist(A.points[i], centers[j]);
                if (d < bd) {
                    bd = d;
                    best = j;
                }
            }
            assign[i] = best;
        }
    };
    auto recenter = [&]() -> double {
        double radius = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<const StatePoint*> members;
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == j) members.push_back(&A.points[i]);
            if (members.empty()) continue;
            const Ball b = min_enclosing_ball(members, dim);
            centers[j] = b.center;
            radius = std::max(radius, b.radius);
        }
        return radius;
    };

    KCenterSolution best;
    auto remember = [&](double radius) {
        if (radius < best.radius) {
            best.radius = radius;
            best.centers.clear();
            for (const auto& c : centers) best.centers.emplace_back(c);
        }
    };

    reassign();
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 48; ++iter) {
        const double r = recenter();
        remember(r);
        reassign();
        if (r >= prev - 1e-15) break;
        prev = r;
    }

    // Swap descent: move one point across clusters when it lowers the radius.
    // Worth the cost only at small center counts, where the proxy values live.
    if (k >= 2 && k <= 8) {
        bool improved = true;
        for (int pass = 0; pass < 8 && improved; ++pass) {
            improved = false;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t from = assign[i];
                for (std::size_t to = 0; to < k; ++to) {
                    if (to == from) continue;
                    assign[i] = to;
                    const double r = recenter();
                    if (r < best.radius - 1e-15) {
                        remember(r);
                        improved = true;
                        reassign();
                        break;
                    }
                    assign[i] = from;
                }
            }
        }
    }
    return best;
}

/// Exact 1-d k-center: the optimal partition is contiguous on the sorted
/// coordinates, so the minimal interval width is one of the pairwise gaps;
/// search over those with a greedy sweep feasibility check.
inline KCenterSolution exact_k_center_1d(const SampledSet& A, std::size_t k) {
    std::vector<double> xs;
    xs.reserve(A.size());
    for (const auto& p : A.points) xs.push_back(p.coords[0]);
    std::sort(xs.begin(), xs.end());

    auto cover_count = [&](double width) {
        std::size_t count = 0, i = 0;
        while (i < xs.size()) {
            const double right = xs[i] + width;
            ++count;
            while (i < xs.size() && xs[i] <= right) ++i;
        }
        return count;
    };

    std::vector<double> widths{0.0};
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) widths.push_back(xs[j] - xs[i]);
    std::sort(widths.begin(), widths.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
    std::size_t lo = 0, hi = widths.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cover_count(widths[mid]) <= k)
            hi = mid;
        else
            lo = mid + 1;
    }
    const double width = widths[lo];

    KCenterSolution sol;
    sol.radius = width / 2.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        const double left = xs[i];
        std::size_t j = i;
        while (j < xs.size() && xs[j] <= left + width) ++j;
        sol.centers.push_back(StatePoint{left + (xs[j - 1] - left) / 2.0});
        i = j;
    }
    return sol;
}

/// Exact small-instance k-center by branch and bound over assignments in
/// farthest-point order, pruned by the incumbent radius. Falls back to the
/// incumbent when the node budget runs out.
struct AssignmentSearch {
    const SampledSet& A;
    std::size_t k, dim;
    std::vector<std::size_t> order;
    std::vector<std::vector<const StatePoint*>> groups;
    double best_radius;
    std::vector<std::vector<const StatePoint*>> best_groups;
    long nodes = 0;
    long node_cap = 300'000;

    AssignmentSearch(const SampledSet& a, std::size_t kk, const Metric& m, double incumbent)
        : A(a), k(kk), dim(a.dim()), best_radius(incumbent) {
        order = fps_order(a, m, 0);
    }

    void dfs(std::size_t idx, double current) {
        if (nodes > node_cap) return;
        ++nodes;
        if (idx == order.size()) {
            if (current < best_radius) {
                best_radius = current;
                best_groups = groups;
            }
            return;
        }
        const StatePoint* p = &A.points[order[idx]];
        const std::size_t open = groups.size();
        for (std::size_t g = 0; g < std::min(open + 1, k); ++g) {
            double r;
            if (g == groups.size()) {
                groups.push_back({p});
                r = current;
            } else {
                groups[g].push_back(p);
                r = std::max(current, min_enclosing_ball(groups[g], dim).radius);
            }
            if (r < best_radius - 1e-12) dfs(idx + 1, r);
            groups[g].pop_back();
            if (groups[g].empty()) groups.pop_back();
        }
    }
};

/// Recursive bisection seeding: keep splitting the cluster with the widest
/// enclosing ball at its two mutually farthest members. Allocates centers
/// across separated blobs the way a union of per-blob covers would.
inline std::vector<std::vector<double>> bisecting_seeds(const SampledSet& A, std::size_t k,
                                                        const Metric& m) {
    const std::size_t dim = A.dim();
    std::vector<std::vector<std::size_t>> parts(1);
    for (std::size_t i = 0; i < A.size(); ++i) parts[0].push_back(i);
    while (parts.size() < k) {
        std::size_t widest = parts.size();
        double wr = -1.0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            if (parts[j].size() < 2) continue;
            std::vector<const StatePoint*> members;
            for (auto i : parts[j]) members.push_back(&A.points[i]);
            const double r = min_enclosing_ball(members, dim).radius;
            if (r > wr) {
                wr = r;
                widest = j;
            }
        }
        if (widest == parts.size() || wr <= 0.0) break;
        auto part = parts[widest];
        // Two seeds: lexicographically smallest member, then the farthest one.
        std::size_t s1 = part[0];
        for (auto i : part)
            if (A.points[i].lex_less(A.points[s1])) s1 = i;
        std::size_t s2 = s1;
        double far = -1.0;
        for (auto i : part) {
            const double d = m(A.points[i], A.points[s1]);
            if (d > far) {
                far = d;
                s2 = i;
            }
        }
        std::vector<std::size_t> left, right;
        for (auto i : part)
            (m(A.points[i], A.points[s1]) <= m(A.points[i], A.points[s2]) ? left : right)
                .push_back(i);
        parts[widest] = std::move(left);
        parts.push_back(std::move(right));
    }
    std::vector<std::vector<double>> seeds;
    for (const auto& part : parts) {
        if (part.empty()) continue;
        std::vector<const StatePoint*> members;
        for (auto i : part) members.push_back(&A.points[i]);
        seeds.push_back(min_enclosing_ball(members, dim).center);
    }
    return seeds;
}

/// Best free-center cover of A by at most k balls: exact in 1-d and on small
/// instances, optimized heuristic (deterministic farthest-point and bisection
/// seedings, swap and jump descent) beyond.
inline KCenterSolution k_center(const SampledSet& A, std::size_t k, const Metric& m) {
    if (A.dim() == 1 && A.size() <= 1500) return exact_k_center_1d(A, k);

    std::vector<std::vector<std::vector<double>>> starts;
    const std::size_t fps_starts = std::min<std::size_t>(3, A.size());
    for (std::size_t s = 0; s < fps_starts; ++s) {
        auto order = fps_order(A, m, s == 2 ? A.size() - 1 : s);
        if (order.size() < k) {
            // Fewer distinct points than centers: zero-radius cover.
            KCenterSolution sol;
            sol.radius = 0.0;
            for (auto i : order) sol.centers.push_back(A.points[i]);
            return sol;
        }
        order.resize(k);
        std::vector<std::vector<double>> centers;
        for (auto i : order) centers.push_back(A.points[i].coords);
        starts.push_back(std::move(centers));
    }
    if (k >= 2) starts.push_back(bisecting_seeds(A, k, m));

    KCenterSolution best;
    for (auto& centers : starts) {
        auto sol = lloyd_minimax(A, std::move(centers));
        if (sol.radius < best.radius) best = sol;
    }

    // Jump moves: relocate one center onto the point farthest from the others
    // and re-optimize. Migrates capacity between separated blobs, which the
    // assignment-level swaps cannot do.
    if (k >= 2 && k <= 8) {
        for (int round = 0; round < 6; ++round) {
            KCenterSolution improved = best;
            for (std::size_t drop = 0; drop < best.centers.size(); ++drop) {
                std::vector<std::vector<double>> centers;
                for (std::size_t j = 0; j < best.centers.size(); ++j)
                    if (j != drop) centers.push_back(best.centers[j].coords);
                std::size_t far_idx = 0;
                double far = -1.0;
                for (std::size_t i = 0; i < A.size(); ++i) {
                    double nearest = std::numeric_limits<double>::infinity();
                    for (const auto& c : centers)
                        nearest = std::min(nearest, raw_dist(A.points[i], c));
                    if (nearest > far) {
                        far = nearest;
                        far_idx = i;
                    }
                }
                centers.push_back(A.points[far_idx].coords);
                auto sol = lloyd_minimax(A, std::move(centers));
                if (sol.radius < improved.radius) improved = sol;
            }
            if (improved.radius >= best.radius - 1e-15) break;
            best = improved;
        }
    }

    // Exact refinement on small instances; the incumbent makes pruning sharp.
    if (k >= 2 && k <= 5 && A.size() <= 32) {
        AssignmentSearch search(A, k, m, best.radius);
        search.dfs(0, 0.0);
        if (!search.best_groups.empty() && search.best_radius < best.radius) {
            best.radius = search.best_radius;
            best.centers.clear();
            for (const auto& g : search.best_groups)
                best.centers.emplace_back(min_enclosing_ball(g, A.dim()).center);
        }
    }
    return best;
}

}  // namespace detail

/// Cover A by balls of diameter `delta`: centers are seeded farthest-point-
/// first, then optimized (free centers, exact enclosing balls, swap descent).
/// Deterministic; ball_count <= |A.points|; every point lies within delta/2 of
/// some center.
inline CoveringProfile greedy_cover(const SampledSet& A, double delta,
                                    const Metric& m = Metric::euclidean()) {
    if (!(delta > 0.0)) throw std::invalid_argument("greedy_cover: delta <= 0");
    const double weight = std::sqrt(m.coord_weight);
    detail::KCenterSolution best;
    for (std::size_t k = 1; k <= A.size(); ++k) {
        auto sol = detail::k_center(A, k, m);
        if (sol.radius < best.radius) best = sol;
        if (2.0 * best.radius * weight <= delta) break;
    }
    CoveringProfile profile;
    profile.delta = delta;
    profile.centers = best.centers;
    profile.ball_count = best.centers.size();
    return profile;
}

/// Budgeted Kuratowski proxy: the minimal ball diameter delta such that the
/// optimized cover of A needs at most `budget` balls; equal to twice the best
/// covering radius over center counts up to the budget, which is the exact
/// value a bisection over greedy_cover converges to. Monotone nonincreasing in
/// the budget. Finite clouds are compact, so this is a resolution diagnostic,
/// not the Kuratowski measure itself.
inline double kuratowski_proxy(const SampledSet& A, int budget,
                               const Metric& m = Metric::euclidean()) {
    if (budget < 1) throw std::invalid_argument("kuratowski_proxy: budget < 1");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= std::min<std::size_t>(static_cast<std::size_t>(budget), A.size());
         ++k) {
        best = std::min(best, detail::k_center(A, k, m).radius);
        if (best == 0.0) break;
    }
    return 2.0 * best * std::sqrt(m.coord_weight);
}

}  // namespace pullback
