#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pullback/state.hpp"
#include "pullback/util.hpp"

namespace pullback {

/// Deterministic samples of a closed ball: the center, axis-aligned spokes at
/// a few radii (so low-dimensional landmarks are always present), and
/// rng-driven interior points via normalized gaussian directions.
inline SampledSet sample_ball(const StatePoint& center, double radius, std::size_t count,
                              std::uint64_t seed, const Metric& metric = Metric::euclidean(),
                              std::string label = "ball") {
    const std::size_t dim = center.dim();
    std::vector<StatePoint> pts;
    pts.push_back(center);
    const double unit = std::sqrt(metric.coord_weight);
    for (std::size_t d = 0; d < dim && pts.size() + 1 < count; ++d) {
        for (double frac : {1.0, 0.5}) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> c(center.coords);
                c[d] += sign * frac * radius / unit;
                pts.emplace_back(std::move(c));
                if (pts.size() + 1 >= count) break;
            }
            if (pts.size() + 1 >= count) break;
        }
    }
    SplitMix64 rng(seed);
    auto gaussian = [&]() {
        const double u1 = std::max(rng.uniform(), 1e-300);
        const double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::acos(-1.0) * u2);
    };
    while (pts.size() < count) {
        std::vector<double> dir(dim);
        double nn = 0.0;
        for (auto& v : dir) {
            v = gaussian();
            nn += v * v;
        }
        nn = std::sqrt(std::max(nn, 1e-300));
        const double r =
            radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim)) / (unit * nn);
        std::vector<double> c(center.coords);
        for (std::size_t d = 0; d < dim; ++d) c[d] += r * dir[d];
        pts.emplace_back(std::move(c));
    }
    return SampledSet(std::move(pts), std::move(label));
}

/// Uniform grid over an axis-aligned box; shape gives the point count per axis.
inline SampledSet sample_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                              const std::vector<std::size_t>& shape, std::string label = "grid") {
    if (lo.size() != hi.size() || lo.size() != shape.size())
        throw std::invalid_argument("sample_grid: mismatched box description");
    const std::size_t dim = lo.size();
    std::vector<StatePoint> pts;
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
        std::vector<double> c(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            c[d] = shape[d] > 1 ? lo[d] + (hi[d] - lo[d]) * static_cast<double>(idx[d]) /
                                              static_cast<double>(shape[d] - 1)
                                : lo[d];
        }
        pts.emplace_back(std::move(c));
        std::size_t d = 0;
        while (d < dim && ++idx[d] == shape[d]) idx[d++] = 0;
        if (d == dim) break;
    }
    return SampledSet(std::move(pts), std::move(label));
}

}  // namespace pullback
