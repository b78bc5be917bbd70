#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pullback {

/// A point of the phase space: a finite coordinate vector, either Euclidean
/// coordinates or coefficients against an orthonormal-in-V basis of H.
struct StatePoint {
    std::vector<double> coords;

    StatePoint() = default;
    StatePoint(std::initializer_list<double> c) : coords(c) { validate(); }
    explicit StatePoint(std::vector<double> c) : coords(std::move(c)) { validate(); }

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    double& operator[](std::size_t i) { return coords[i]; }

    void validate() const {
        if (coords.empty())
            throw std::invalid_argument("StatePoint: empty coordinate vector");
        for (double c : coords)
            if (!std::isfinite(c))
                throw std::invalid_argument("StatePoint: non-finite coordinate");
    }

    bool operator==(const StatePoint& o) const { return coords == o.coords; }

    // Lexicographic order on coordinates, used for deterministic tie-breaking.
    bool lex_less(const StatePoint& o) const {
        return std::lexicographical_compare(coords.begin(), coords.end(),
                                            o.coords.begin(), o.coords.end());
    }
};

/// Metric on coordinate vectors. `coord_weight` is the squared-norm weight of
/// each basis vector in H; 1 for plain Euclidean coordinates, pi/2 when the
/// coordinates are coefficients against sin(k x) on (0,pi), where every mode
/// has ||sin(k x)||_H^2 = pi/2.
struct Metric {
    double coord_weight = 1.0;

    static Metric euclidean() { return Metric{1.0}; }
    static Metric sine_modes() { return Metric{std::acos(-1.0) / 2.0}; }

    double operator()(const StatePoint& x, const StatePoint& y) const {
        if (x.dim() != y.dim())
            throw std::invalid_argument("distance: dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < x.dim(); ++i) {
            const double d = x.coords[i] - y.coords[i];
            s += d * d;
        }
        return std::sqrt(coord_weight * s);
    }

    double norm(const StatePoint& x) const {
        double s = 0.0;
        for (double c : x.coords) s += c * c;
        return std::sqrt(coord_weight * s);
    }

    /// Norm of the coordinates with index > m (1-based mode count kept).
    double tail_norm(const StatePoint& x, std::size_t m) const {
        double s = 0.0;
        for (std::size_t i = m; i < x.dim(); ++i) s += x.coords[i] * x.coords[i];
        return std::sqrt(coord_weight * s);
    }
};

/// A finite weighted point cloud standing for a bounded subset of the phase
/// space. Nonempty; all points share one dimension.
struct SampledSet {
    std::vector<StatePoint> points;
    std::string label;

    SampledSet() = default;
    explicit SampledSet(std::vector<StatePoint> pts, std::string lbl = "")
        : points(std::move(pts)), label(std::move(lbl)) {
        validate();
    }
    SampledSet(std::initializer_list<StatePoint> pts, std::string lbl = "")
        : points(pts), label(std::move(lbl)) {
        validate();
    }

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.front().dim(); }

    void validate() const {
        if (points.empty())
            throw std::invalid_argument("SampledSet: empty point cloud");
        const std::size_t d = points.front().dim();
        for (const auto& p : points) {
            p.validate();
            if (p.dim() != d)
                throw std::invalid_argument("SampledSet: mixed dimensions");
        }
    }
};

/// A map from a finite time grid to SampledSets; houses the families
/// {K(t)}, B_0 and the attractor A. Times strictly increasing.
struct NonautonomousSet {
    std::vector<double> times;
    std::vector<SampledSet> sets;

    NonautonomousSet() = default;
    NonautonomousSet(std::vector<double> ts, std::vector<SampledSet> ss)
        : times(std::move(ts)), sets(std::move(ss)) {
        validate();
    }

    /// Same section at every grid time.
    static NonautonomousSet constant(std::vector<double> ts, const SampledSet& s) {
        std::vector<SampledSet> ss(ts.size(), s);
        return NonautonomousSet(std::move(ts), std::move(ss));
    }

    void validate() const {
        if (times.size() != sets.size())
            throw std::invalid_argument("NonautonomousSet: times/sets size mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i - 1] < times[i]))
                throw std::invalid_argument("NonautonomousSet: times not strictly increasing");
        for (const auto& s : sets) s.validate();
    }

    bool has_time(double t) const {
        for (double u : times)
            if (u == t) return true;
        return false;
    }

    const SampledSet& at(double t) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] == t) return sets[i];
        throw std::out_of_range("NonautonomousSet: time not on grid");
    }
};

/// A finite cover of a sampled set by balls of diameter `delta`: every covered
/// point lies within delta/2 of some center.
struct CoveringProfile {
    double delta = 0.0;
    std::size_t ball_count = 0;
    std::vector<StatePoint> centers;
};

}  // namespace pullback
