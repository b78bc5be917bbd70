#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pullback/state.hpp"

namespace pullback {

enum class ProcessKind { general, strict, semiflow };

inline std::string to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::general: return "general";
        case ProcessKind::strict: return "strict";
        case ProcessKind::semiflow: return "semiflow";
    }
    return "general";
}

/// An evaluatable m-process: (t, tau, seeds, branch budget, rng seed) -> image
/// set. Identity at t = tau is enforced here, not delegated to the wrapped
/// evolution map, so the residual of axiom (i) is exactly zero. Evaluation
/// must be a pure function of its arguments.
struct ProcessHandle {
    using EvolveFn = std::function<SampledSet(double t, double tau, const SampledSet& seeds,
                                              int branch_budget, std::uint64_t rng_seed)>;

    EvolveFn evolve_fn;
    ProcessKind kind = ProcessKind::general;
    std::size_t dimension = 0;
    Metric metric = Metric::euclidean();
    std::string name;

    SampledSet evolve(double t, double tau, const SampledSet& seeds, int branch_budget = 1,
                      std::uint64_t rng_seed = 0) const {
        if (tau > t) throw std::invalid_argument("ProcessHandle: tau > t");
        if (seeds.dim() != dimension)
            throw std::invalid_argument("ProcessHandle: seed dimension mismatch");
        if (t == tau) return seeds;
        return evolve_fn(t, tau, seeds, branch_budget, rng_seed);
    }

    SampledSet evolve_point(double t, double tau, const StatePoint& x, int branch_budget = 1,
                            std::uint64_t rng_seed = 0) const {
        return evolve(t, tau, SampledSet({x}), branch_budget, rng_seed);
    }
};

/// A finite stand-in for tau -> -infinity: strictly decreasing start times
/// below the query time t.
struct TauSchedule {
    std::vector<double> taus;

    TauSchedule() = default;
    explicit TauSchedule(std::vector<double> ts) : taus(std::move(ts)) { validate(); }

    /// tau_n = t - h * r^n. Exponential reach, geared to exponential decay.
    static TauSchedule geometric(double t, double h = 1.0, double ratio = 1.5,
                                 std::size_t steps = 20) {
        if (!(h > 0.0) || !(ratio > 1.0) || steps == 0)
            throw std::invalid_argument("TauSchedule::geometric: bad parameters");
        std::vector<double> ts(steps);
        double reach = h;
        for (std::size_t n = 0; n < steps; ++n) {
            ts[n] = t - reach;
            reach *= ratio;
        }
        return TauSchedule(std::move(ts));
    }

    /// tau_n = t - n * step for n = 1..count.
    static TauSchedule linear(double t, double step, std::size_t count) {
        if (!(step > 0.0) || count == 0)
            throw std::invalid_argument("TauSchedule::linear: bad parameters");
        std::vector<double> ts(count);
        for (std::size_t n = 0; n < count; ++n) ts[n] = t - step * static_cast<double>(n + 1);
        return TauSchedule(std::move(ts));
    }

    std::size_t size() const { return taus.size(); }
    double horizon() const { return taus.back(); }

    void validate() const {
        if (taus.empty()) throw std::invalid_argument("TauSchedule: empty");
        for (std::size_t i = 1; i < taus.size(); ++i)
            if (!(taus[i] < taus[i - 1]))
                throw std::invalid_argument("TauSchedule: not strictly decreasing");
    }
};

}  // namespace pullback
