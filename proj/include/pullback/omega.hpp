#pragma once

#include <cstring>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "pullback/metric_ops.hpp"
#include "pullback/process.hpp"
#include "pullback/util.hpp"

namespace pullback {

struct OmegaLimitResult {
    SampledSet limit_set;
    bool converged = false;
    std::vector<std::pair<double, double>> attraction_curve;  // (tau, semidistance)
};

namespace detail {

struct TaggedCloud {
    std::vector<StatePoint> points;          // bitwise-distinct points
    std::vector<std::vector<int>> tau_tags;  // schedule indices that produced each point

    void add(const StatePoint& p, int tag) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i] == p) {
                if (tau_tags[i].empty() || tau_tags[i].back() != tag) tau_tags[i].push_back(tag);
                return;
            }
        }
        points.push_back(p);
        tau_tags.push_back({tag});
    }
};

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

/// Single-linkage components at linkage distance eps, then one representative
/// per eps-cell: greedy pick in first-seen order, each representative replaced
/// by the mean of the points assigned to it. Components are kept only when
/// their points recur across at least `min_hits` distinct schedule entries.
inline std::vector<StatePoint> cluster_representatives(const TaggedCloud& cloud,
                                                       const Metric& m, double eps,
                                                       int min_hits, bool* any_kept) {
    const std::size_t n = cloud.points.size();
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m(cloud.points[i], cloud.points[j]) <= eps) uf.unite(i, j);

    std::map<std::size_t, std::vector<std::size_t>> components;  // root -> member order
    for (std::size_t i = 0; i < n; ++i) components[uf.find(i)].push_back(i);

    std::vector<std::vector<std::size_t>> kept;
    for (auto& [root, members] : components) {
        std::vector<int> tags;
        for (auto i : members)
            for (int tg : cloud.tau_tags[i]) tags.push_back(tg);
        std::sort(tags.begin(), tags.end());
        tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
        if (static_cast<int>(tags.size()) >= min_hits) kept.push_back(members);
    }
    if (any_kept) *any_kept = !kept.empty();
    if (kept.empty())
        for (auto& [root, members] : components) kept.push_back(members);

    // Deterministic order: by earliest member index.
    std::sort(kept.begin(), kept.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    std::vector<StatePoint> reps;
    for (const auto& members : kept) {
        std::vector<std::size_t> cell_rep;  // indices of representatives in this component
        for (auto i : members) {
            bool close = false;
            for (auto r : cell_rep)
                if (m(cloud.points[i], cloud.points[r]) <= eps) {
                    close = true;
                    break;
                }
            if (!close) cell_rep.push_back(i);
        }
        // Replace each representative by the mean of its assigned points.
        const std::size_t dim = cloud.points.front().dim();
        std::vector<std::vector<double>> acc(cell_rep.size(), std::vector<double>(dim, 0.0));
        std::vector<std::size_t> cnt(cell_rep.size(), 0);
        for (auto i : members) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < cell_rep.size(); ++r) {
                const double d = m(cloud.points[i], cloud.points[cell_rep[r]]);
                if (d < bd) {
                    bd = d;
                    best = r;
                }
            }
            for (std::size_t d = 0; d < dim; ++d) acc[best][d] += cloud.points[i].coords[d];
            ++cnt[best];
        }
        for (std::size_t r = 0; r < cell_rep.size(); ++r) {
            if (cnt[r] == 0) continue;
            std::vector<double> c(dim);
            for (std::size_t d = 0; d < dim; ++d) c[d] = acc[r][d] / static_cast<double>(cnt[r]);
            reps.emplace_back(std::move(c));
        }
    }
    return reps;
}

inline bool nonincreasing_tail(const std::vector<std::pair<double, double>>& curve,
                               std::size_t from, double slack) {
    for (std::size_t i = from; i + 1 < curve.size(); ++i)
        if (curve[i + 1].second > curve[i].second + slack) return false;
    return true;
}

}  // namespace detail

/// Pullback omega-limit estimate: images of B released at the scheduled start
/// times are collected, and the accumulation region is read off the final half
/// of the schedule. A single-linkage cluster counts only when it is hit by at
/// least three distinct schedule entries. Divergence (the drift scenario) is
/// flagged when the cumulative image union keeps growing across the last five
/// schedule points.
inline OmegaLimitResult omega_limit(const ProcessHandle& p, double t, const SampledSet& B,
                                    const TauSchedule& sched, double cluster_eps,
                                    double tol = 1e-6, int branch_budget = 1,
                                    std::uint64_t rng_seed = 0) {
    const std::size_t N = sched.size();
    std::vector<SampledSet> images;
    images.reserve(N);
    for (std::size_t n = 0; n < N; ++n)
        images.push_back(p.evolve(t, sched.taus[n], B, branch_budget, mix_seed(rng_seed, n)));

    // Divergence: cumulative union keeps growing near the end. The union
    // diameter is tracked through the bounding-box diagonal, which is cheap
    // and grows exactly when the union escapes.
    bool diverging = false;
    {
        const std::size_t dim = B.dim();
        std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
        std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
        std::vector<double> diams;
        const std::size_t window = std::min<std::size_t>(5, N);
        for (std::size_t n = 0; n < N; ++n) {
            for (const auto& pt : images[n].points)
                for (std::size_t d = 0; d < dim; ++d) {
                    lo[d] = std::min(lo[d], pt.coords[d]);
                    hi[d] = std::max(hi[d], pt.coords[d]);
                }
            if (n + window >= N) {
                double s = 0.0;
                for (std::size_t d = 0; d < dim; ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
                diams.push_back(std::sqrt(p.metric.coord_weight * s));
            }
        }
        diverging = diams.size() >= 2;
        for (std::size_t i = 0; i + 1 < diams.size(); ++i)
            if (!(diams[i + 1] > diams[i] + tol)) diverging = false;
    }

    detail::TaggedCloud cloud;
    const std::size_t half = N / 2;
    for (std::size_t n = half; n < N; ++n)
        for (const auto& pt : images[n].points) cloud.add(pt, static_cast<int>(n));

    const int min_hits = (N - half) >= 3 ? 3 : 1;
    bool any_kept = false;
    auto reps = detail::cluster_representatives(cloud, p.metric, cluster_eps, min_hits, &any_kept);

    OmegaLimitResult result;
    result.limit_set = SampledSet(std::move(reps), "omega(" + std::to_string(t) + ")");
    for (std::size_t n = 0; n < N; ++n)
        result.attraction_curve.emplace_back(sched.taus[n],
                                             semidistance(images[n], result.limit_set, p.metric));

    // Representatives resolve the accumulation region at cluster_eps, so that
    // is the attainable attraction threshold for extended limit sets.
    const double conv_tol = std::max(tol, cluster_eps);
    const double slack = std::max(1e-12, 0.05 * conv_tol);
    const std::size_t quartile = (3 * N) / 4;
    result.converged = any_kept && !diverging &&
                       result.attraction_curve.back().second <= conv_tol &&
                       detail::nonincreasing_tail(result.attraction_curve, quartile, slack);
    return result;
}

}  // namespace pullback
