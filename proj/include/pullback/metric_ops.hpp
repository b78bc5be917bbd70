#pragma once

#include <limits>

#include "pullback/state.hpp"

namespace pullback {

inline double distance(const StatePoint& x, const StatePoint& y,
                       const Metric& m = Metric::euclidean()) {
    return m(x, y);
}

inline double dist_to_set(const StatePoint& x, const SampledSet& B,
                          const Metric& m = Metric::euclidean()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : B.points) best = std::min(best, m(x, b));
    return best;
}

/// Hausdorff semidistance sup_{a in A} inf_{b in B} d(a, b). Not symmetric;
/// zero whenever every point of A appears in B.
inline double semidistance(const SampledSet& A, const SampledSet& B,
                           const Metric& m = Metric::euclidean()) {
    if (A.dim() != B.dim())
        throw std::invalid_argument("semidistance: dimension mismatch");
    double worst = 0.0;
    for (const auto& a : A.points) worst = std::max(worst, dist_to_set(a, B, m));
    return worst;
}

inline double hausdorff(const SampledSet& A, const SampledSet& B,
                        const Metric& m = Metric::euclidean()) {
    return std::max(semidistance(A, B, m), semidistance(B, A, m));
}

/// Whether x lies in the closed eps-neighborhood N_eps(B).
inline bool eps_neighborhood_contains(const SampledSet& B, const StatePoint& x,
                                      double eps,
                                      const Metric& m = Metric::euclidean()) {
    if (eps < 0.0) throw std::invalid_argument("eps_neighborhood_contains: eps < 0");
    return dist_to_set(x, B, m) <= eps;
}

inline double diameter(const SampledSet& A, const Metric& m = Metric::euclidean()) {
    double d = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i + 1; j < A.size(); ++j)
            d = std::max(d, m(A.points[i], A.points[j]));
    return d;
}

}  // namespace pullback
