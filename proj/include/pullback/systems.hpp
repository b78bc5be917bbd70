#pragma once

#include <cmath>
#include <stdexcept>

#include "pullback/process.hpp"

namespace pullback::systems {

// ---------------------------------------------------------------------------
// Drift example on X = R: images forget the seed and escape linearly, so the
// single-time images are singletons while the backward union is a ray.
// ---------------------------------------------------------------------------

inline StatePoint drift_evolve(double t, double tau, const StatePoint& x) {
    if (tau > t) throw std::invalid_argument("drift_evolve: tau > t");
    if (t == tau) return x;
    return StatePoint{t - tau};
}

inline ProcessHandle make_drift_process() {
    ProcessHandle p;
    p.kind = ProcessKind::general;
    p.dimension = 1;
    p.metric = Metric::euclidean();
    p.name = "drift";
    p.evolve_fn = [](double t, double tau, const SampledSet& seeds, int, std::uint64_t) {
        (void)seeds;
        return SampledSet({StatePoint{t - tau}}, "drift-image");
    };
    return p;
}

// ---------------------------------------------------------------------------
// Left shift on l^2 truncated to N coordinates, discrete time.
// ---------------------------------------------------------------------------

inline StatePoint shift_evolve(int n, const StatePoint& x) {
    if (n < 0) throw std::invalid_argument("shift_evolve: negative step count");
    const std::size_t dim = x.dim();
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) < dim; ++i)
        out[i] = x.coords[i + static_cast<std::size_t>(n)];
    return StatePoint(std::move(out));
}

inline ProcessHandle make_shift_process(std::size_t truncation_dim) {
    if (truncation_dim < 2) throw std::invalid_argument("shift process: N >= 2 required");
    ProcessHandle p;
    p.kind = ProcessKind::semiflow;
    p.dimension = truncation_dim;
    p.metric = Metric::euclidean();
    p.name = "shift";
    p.evolve_fn = [](double t, double tau, const SampledSet& seeds, int, std::uint64_t) {
        const double elapsed = t - tau;
        const int n = static_cast<int>(std::llround(elapsed));
        if (std::abs(elapsed - n) > 1e-9 || n < 0)
            throw std::invalid_argument("shift process: elapsed time must be a whole step count");
        std::vector<StatePoint> out;
        out.reserve(seeds.size());
        for (const auto& x : seeds.points) out.push_back(shift_evolve(n, x));
        return SampledSet(std::move(out), "shift-image");
    };
    return p;
}

// ---------------------------------------------------------------------------
// Planar ODE on Z = [0,1] x [0,inf): x stays put, y slides to zero with speed
// x0 (speed 1 on the x0 = 0 edge) and rests there. Closed form, no stepping.
// ---------------------------------------------------------------------------

inline StatePoint planar_evolve(double t, const StatePoint& z0) {
    if (t < 0.0) throw std::invalid_argument("planar_evolve: t < 0");
    if (z0.dim() != 2) throw std::invalid_argument("planar_evolve: needs a 2-d state");
    const double x0 = z0.coords[0];
    const double y0 = z0.coords[1];
    if (x0 < 0.0 || x0 > 1.0 || y0 < 0.0)
        throw std::domain_error("planar_evolve: state outside [0,1] x [0,inf)");
    const double speed = x0 == 0.0 ? 1.0 : x0;
    return StatePoint{x0, std::max(0.0, y0 - speed * t)};
}

inline ProcessHandle make_planar_process() {
    ProcessHandle p;
    p.kind = ProcessKind::semiflow;
    p.dimension = 2;
    p.metric = Metric::euclidean();
    p.name = "planar-ode";
    p.evolve_fn = [](double t, double tau, const SampledSet& seeds, int, std::uint64_t) {
        std::vector<StatePoint> out;
        out.reserve(seeds.size());
        for (const auto& z : seeds.points) out.push_back(planar_evolve(t - tau, z));
        return SampledSet(std::move(out), "planar-image");
    };
    return p;
}

// ---------------------------------------------------------------------------
// Switching heat equation on H = L^2(0,pi), truncated to N sine modes. States
// are coefficients a_k against sin(k x); mode k decays at rate k^2. The
// switch acts only through alpha(u) = a_1: positive alpha runs the plain heat
// semigroup, otherwise the source v''_1 shifts the first mode toward -v^1.
// ---------------------------------------------------------------------------

inline double alpha_of(const StatePoint& u) { return u.coords[0]; }

inline StatePoint heat_switch_evolve(double t, const StatePoint& u) {
    if (t < 0.0) throw std::invalid_argument("heat_switch_evolve: t < 0");
    std::vector<double> out(u.dim());
    const double a1 = alpha_of(u);
    if (a1 > 0.0) {
        for (std::size_t k = 0; k < u.dim(); ++k) {
            const double lam = static_cast<double>((k + 1) * (k + 1));
            out[k] = u.coords[k] * std::exp(-lam * t);
        }
    } else {
        out[0] = (a1 + 1.0) * std::exp(-t) - 1.0;
        for (std::size_t k = 1; k < u.dim(); ++k) {
            const double lam = static_cast<double>((k + 1) * (k + 1));
            out[k] = u.coords[k] * std::exp(-lam * t);
        }
    }
    return StatePoint(std::move(out));
}

inline ProcessHandle make_heat_switch_process(std::size_t modes) {
    if (modes < 2) throw std::invalid_argument("heat-switch process: N >= 2 required");
    ProcessHandle p;
    p.kind = ProcessKind::semiflow;
    p.dimension = modes;
    p.metric = Metric::sine_modes();
    p.name = "heat-switch";
    p.evolve_fn = [](double t, double tau, const SampledSet& seeds, int, std::uint64_t) {
        std::vector<StatePoint> out;
        out.reserve(seeds.size());
        for (const auto& u : seeds.points) out.push_back(heat_switch_evolve(t - tau, u));
        return SampledSet(std::move(out), "heat-switch-image");
    };
    return p;
}

/// Pure heat semigroup (no switching): every mode decays, the origin attracts.
inline ProcessHandle make_pure_heat_process(std::size_t modes) {
    ProcessHandle p = make_heat_switch_process(modes);
    p.name = "pure-heat";
    p.evolve_fn = [](double t, double tau, const SampledSet& seeds, int, std::uint64_t) {
        std::vector<StatePoint> out;
        out.reserve(seeds.size());
        for (const auto& u : seeds.points) {
            std::vector<double> c(u.dim());
            for (std::size_t k = 0; k < u.dim(); ++k) {
                const double lam = static_cast<double>((k + 1) * (k + 1));
                c[k] = u.coords[k] * std::exp(-lam * (t - tau));
            }
            out.emplace_back(std::move(c));
        }
        return SampledSet(std::move(out), "pure-heat-image");
    };
    return p;
}

}  // namespace pullback::systems
