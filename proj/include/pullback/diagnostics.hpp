#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pullback/omega.hpp"

namespace pullback {

/// Attached to every report: finite clouds and branch samples under-approximate
/// the sets they stand for, so inclusion verdicts are sound for refutation and
/// sampled for confirmation.
inline constexpr const char* kSamplingCaveat =
    "sampled verdict: point clouds and branch ensembles under-approximate sets; "
    "inclusion checks are necessary conditions";

/// How tau -> -infinity is realized for diagnostics that scan several query
/// times: one schedule shape, rebuilt below each t.
struct ScheduleSpec {
    enum class Type { geometric, linear };
    Type type = Type::geometric;
    double h = 1.0;
    double ratio = 1.5;
    double step = 1.0;
    std::size_t steps = 20;

    static ScheduleSpec geometric(double h = 1.0, double ratio = 1.5, std::size_t steps = 20) {
        ScheduleSpec s;
        s.type = Type::geometric;
        s.h = h;
        s.ratio = ratio;
        s.steps = steps;
        return s;
    }
    static ScheduleSpec linear(double step, std::size_t steps) {
        ScheduleSpec s;
        s.type = Type::linear;
        s.step = step;
        s.steps = steps;
        return s;
    }

    TauSchedule build(double t) const {
        return type == Type::geometric ? TauSchedule::geometric(t, h, ratio, steps)
                                       : TauSchedule::linear(t, step, steps);
    }

    /// Same shape reaching `factor` times deeper into the past.
    ScheduleSpec extended(double factor) const {
        ScheduleSpec s = *this;
        if (type == Type::geometric) {
            s.steps += static_cast<std::size_t>(std::ceil(std::log(factor) / std::log(ratio)));
        } else {
            s.steps = static_cast<std::size_t>(std::ceil(static_cast<double>(steps) * factor));
        }
        return s;
    }
};

// ---------------------------------------------------------------------------
// Axioms
// ---------------------------------------------------------------------------

struct AxiomProbe {
    double t, s, tau;
    StatePoint x;
};

struct AxiomProbeResult {
    AxiomProbe probe;
    double identity_residual = 0.0;        // both-way semidistance at t = tau
    double subcomposition_residual = 0.0;  // dist(U(t,tau;x), U(t,s;U(s,tau;x)))
    double strictness_residual = 0.0;      // reverse semidistance (equality case)
};

struct AxiomReport {
    std::vector<AxiomProbeResult> probes;
    double max_identity = 0.0;
    double max_subcomposition = 0.0;
    double max_strictness = 0.0;
    bool identity_ok = true;
    bool subcomposition_ok = true;
    bool strict_ok = true;
    double tol = 0.0;
    std::string caveat = kSamplingCaveat;
};

/// Residuals of the m-process axioms. Identity is enforced structurally by
/// ProcessHandle, so its residual is exactly zero; residuals are reported even
/// when large.
inline AxiomReport check_axioms(const ProcessHandle& p, const std::vector<AxiomProbe>& probes,
                                double tol, int branch_budget = 1, std::uint64_t rng_seed = 0) {
    AxiomReport report;
    report.tol = tol;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& pr = probes[i];
        if (!(pr.t >= pr.s && pr.s >= pr.tau))
            throw std::invalid_argument("check_axioms: probe needs t >= s >= tau");
        AxiomProbeResult row;
        row.probe = pr;

        const SampledSet x_set({pr.x});
        const SampledSet ident = p.evolve(pr.tau, pr.tau, x_set, branch_budget, rng_seed);
        row.identity_residual = std::max(semidistance(ident, x_set, p.metric),
                                         semidistance(x_set, ident, p.metric));

        const auto seed_direct = mix_seed(rng_seed, 3 * i);
        const auto seed_inner = mix_seed(rng_seed, 3 * i + 1);
        const auto seed_outer = mix_seed(rng_seed, 3 * i + 2);
        const SampledSet direct = p.evolve(pr.t, pr.tau, x_set, branch_budget, seed_direct);
        const SampledSet mid = p.evolve(pr.s, pr.tau, x_set, branch_budget, seed_inner);
        const SampledSet composed = p.evolve(pr.t, pr.s, mid, branch_budget, seed_outer);
        row.subcomposition_residual = semidistance(direct, composed, p.metric);
        row.strictness_residual = semidistance(composed, direct, p.metric);

        report.max_identity = std::max(report.max_identity, row.identity_residual);
        report.max_subcomposition = std::max(report.max_subcomposition, row.subcomposition_residual);
        report.max_strictness = std::max(report.max_strictness, row.strictness_residual);
        report.probes.push_back(std::move(row));
    }
    report.identity_ok = report.max_identity <= tol;
    report.subcomposition_ok = report.max_subcomposition <= tol;
    report.strict_ok = report.subcomposition_ok && report.max_strictness <= tol;
    return report;
}

// ---------------------------------------------------------------------------
// Attraction
// ---------------------------------------------------------------------------

struct AttractionResult {
    std::vector<std::pair<double, double>> curve;  // (tau, dist(U(t,tau;B), K(t)))
    bool attracted = false;
    double tol = 0.0;
    std::string set_label;
    std::string caveat = kSamplingCaveat;
};

/// dist(U(t,tau_n;B), K(t)) along the schedule; attracted when the last value
/// is below tol and the trend is nonincreasing over the final quartile.
inline AttractionResult attraction_test(const ProcessHandle& p, const NonautonomousSet& K,
                                        const SampledSet& B, double t, const TauSchedule& sched,
                                        double tol = 1e-6, int branch_budget = 1,
                                        std::uint64_t rng_seed = 0) {
    const SampledSet& target = K.at(t);
    AttractionResult res;
    res.tol = tol;
    res.set_label = B.label;
    for (std::size_t n = 0; n < sched.size(); ++n) {
        const auto img = p.evolve(t, sched.taus[n], B, branch_budget, mix_seed(rng_seed, n));
        res.curve.emplace_back(sched.taus[n], semidistance(img, target, p.metric));
    }
    const double slack = std::max(1e-12, 0.05 * tol);
    res.attracted = res.curve.back().second <= tol &&
                    detail::nonincreasing_tail(res.curve, (3 * sched.size()) / 4, slack);
    return res;
}

// ---------------------------------------------------------------------------
// Dissipativity
// ---------------------------------------------------------------------------

struct EnteringTime {
    double t = 0.0;
    std::string label;
    bool absorbed = false;
    double elapsed = std::numeric_limits<double>::quiet_NaN();  // t - tau_bar
};

struct DissipativityReport {
    bool absorbing = false;
    std::vector<EnteringTime> entering_times;
    bool monotone = false;
    bool backward_bounded = false;
    bool point_dissipative = false;
    double tol = 0.0;
    double backward_diameter = 0.0;
    std::string caveat = kSamplingCaveat;
};

namespace detail {

/// Largest scheduled tau_bar such that the inclusion holds for every scheduled
/// tau <= tau_bar; reported as elapsed time t - tau_bar.
inline EnteringTime entering_time(const ProcessHandle& p, const SampledSet& candidate,
                                  const SampledSet& E, double t, const TauSchedule& sched,
                                  double tol, int branch_budget, std::uint64_t rng_seed) {
    EnteringTime row;
    row.t = t;
    row.label = E.label;
    std::vector<bool> inside(sched.size());
    for (std::size_t n = 0; n < sched.size(); ++n) {
        const auto img = p.evolve(t, sched.taus[n], E, branch_budget, mix_seed(rng_seed, n));
        inside[n] = semidistance(img, candidate, p.metric) <= tol;
    }
    std::size_t first_bad_after = sched.size();  // start of the all-true suffix
    for (std::size_t n = sched.size(); n-- > 0;) {
        if (!inside[n]) break;
        first_bad_after = n;
    }
    if (first_bad_after < sched.size()) {
        row.absorbed = true;
        row.elapsed = t - sched.taus[first_bad_after];
    }
    return row;
}

}  // namespace detail

/// Classification against Definition 3.1 and Proposition 3.4: pullback
/// absorption of every test set into the candidate family, monotonicity of the
/// candidate, backward boundedness, and point-dissipativity. Point absorption
/// is checked on the singletons of the test sets with a deeper schedule, since
/// single points may enter much later than the verdict horizon used for the
/// absorbing check (the planar system needs exactly this split).
inline DissipativityReport dissipativity_classify(
    const ProcessHandle& p, const NonautonomousSet& candidate,
    const std::vector<SampledSet>& test_sets, const std::vector<double>& times,
    const ScheduleSpec& sched, double tol = 1e-6, int branch_budget = 1,
    std::uint64_t rng_seed = 0, double backward_cap = 1e6, double point_horizon_factor = 8.0) {
    DissipativityReport report;
    report.tol = tol;

    report.absorbing = true;
    std::uint64_t salt = 0;
    for (double t : times) {
        const SampledSet& cand_t = candidate.at(t);
        const TauSchedule tau_sched = sched.build(t);
        for (const auto& E : test_sets) {
            auto row = detail::entering_time(p, cand_t, E, t, tau_sched, tol, branch_budget,
                                             mix_seed(rng_seed, ++salt));
            if (!row.absorbed) report.absorbing = false;
            report.entering_times.push_back(std::move(row));
        }
    }

    report.monotone = true;
    for (std::size_t i = 0; i < candidate.times.size(); ++i)
        for (std::size_t j = i + 1; j < candidate.times.size(); ++j)
            if (semidistance(candidate.sets[i], candidate.sets[j], p.metric) > tol)
                report.monotone = false;

    // Backward boundedness of the candidate family on its own grid.
    {
        std::vector<StatePoint> unioned;
        double widest = 0.0;
        for (const auto& s : candidate.sets) {
            unioned.insert(unioned.end(), s.points.begin(), s.points.end());
            widest = std::max(widest, diameter(SampledSet(unioned), p.metric));
        }
        report.backward_diameter = widest;
        report.backward_bounded = widest <= backward_cap;
    }

    report.point_dissipative = true;
    const ScheduleSpec deep = sched.extended(point_horizon_factor);
    for (double t : times) {
        const SampledSet& cand_t = candidate.at(t);
        const TauSchedule tau_sched = deep.build(t);
        for (const auto& E : test_sets)
            for (const auto& x : E.points) {
                const SampledSet single({x});
                auto row = detail::entering_time(p, cand_t, single, t, tau_sched, tol,
                                                 branch_budget, rng_seed);
                if (!row.absorbed) report.point_dissipative = false;
            }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Point-dissipativity (semiflows)
// ---------------------------------------------------------------------------

struct PointEnteringTime {
    StatePoint point;
    bool entered = false;
    double entering_time = std::numeric_limits<double>::quiet_NaN();
};

struct PointDissipativityReport {
    std::vector<PointEnteringTime> rows;
    bool point_dissipative = false;
    double tol = 0.0;
    std::string caveat = kSamplingCaveat;
};

/// Per-point entering times of a semiflow into N_tol(candidate): the earliest
/// sampled elapsed time from which every later sampled time stays inside.
inline PointDissipativityReport point_dissipativity_test(
    const ProcessHandle& p, const SampledSet& candidate, const std::vector<StatePoint>& points,
    const std::vector<double>& sample_times, double tol = 1e-6, int branch_budget = 1,
    std::uint64_t rng_seed = 0) {
    if (p.kind != ProcessKind::semiflow)
        throw std::invalid_argument("point_dissipativity_test: semiflow process required");
    if (sample_times.empty())
        throw std::invalid_argument("point_dissipativity_test: empty sample times");
    PointDissipativityReport report;
    report.tol = tol;
    report.point_dissipative = true;
    for (const auto& x : points) {
        PointEnteringTime row;
        row.point = x;
        std::vector<bool> inside(sample_times.size());
        for (std::size_t i = 0; i < sample_times.size(); ++i) {
            const auto img = p.evolve(sample_times[i], 0.0, SampledSet({x}), branch_budget,
                                      mix_seed(rng_seed, i));
            inside[i] = semidistance(img, candidate, p.metric) <= tol;
        }
        std::size_t first = sample_times.size();
        for (std::size_t i = sample_times.size(); i-- > 0;) {
            if (!inside[i]) break;
            first = i;
        }
        if (first < sample_times.size()) {
            row.entered = true;
            row.entering_time = sample_times[first];
        } else {
            report.point_dissipative = false;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Flattening
// ---------------------------------------------------------------------------

struct FlatteningResult {
    double sup_tail = 0.0;
    std::size_t modes_kept = 0;
    std::vector<std::pair<double, double>> tail_curve;  // (tau, sup tail at that tau)
    std::string caveat = kSamplingCaveat;
};

/// Sup of the truncation tail over the sampled backward union: P_E is the
/// truncation to the first m coordinates, and the reported value is
/// sup ||(I - P_m) u|| over all scheduled start times and branch points.
inline FlatteningResult flattening_test(const ProcessHandle& p, const SampledSet& B, double t,
                                        std::size_t m, const TauSchedule& sched,
                                        int branch_budget = 1, std::uint64_t rng_seed = 0) {
    if (m >= p.dimension) throw std::invalid_argument("flattening_test: m out of range");
    FlatteningResult res;
    res.modes_kept = m;
    for (std::size_t n = 0; n < sched.size(); ++n) {
        const auto img = p.evolve(t, sched.taus[n], B, branch_budget, mix_seed(rng_seed, n));
        double worst = 0.0;
        for (const auto& pt : img.points) worst = std::max(worst, p.metric.tail_norm(pt, m));
        res.tail_curve.emplace_back(sched.taus[n], worst);
        res.sup_tail = std::max(res.sup_tail, worst);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Closedness
// ---------------------------------------------------------------------------

/// A sequence eta_n -> eta driving the closed-graph probe.
struct EtaSequence {
    std::vector<StatePoint> etas;
    StatePoint limit;

    /// limit + ratio^k * direction, k = 0..count-1.
    static EtaSequence geometric_approach(const StatePoint& limit, const StatePoint& direction,
                                          double ratio = 0.5, std::size_t count = 45) {
        EtaSequence seq;
        seq.limit = limit;
        double scale = 1.0;
        for (std::size_t k = 0; k < count; ++k) {
            std::vector<double> c(limit.coords);
            for (std::size_t d = 0; d < c.size(); ++d) c[d] += scale * direction.coords[d];
            seq.etas.emplace_back(std::move(c));
            scale *= ratio;
        }
        return seq;
    }
};

enum class ClosednessVerdict { pass, violation, inconclusive };

inline std::string to_string(ClosednessVerdict v) {
    switch (v) {
        case ClosednessVerdict::pass: return "pass";
        case ClosednessVerdict::violation: return "violation";
        case ClosednessVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct ClosednessWitness {
    double t = 0.0;
    double t_star = 0.0;
    std::vector<StatePoint> eta_seq;
    std::vector<StatePoint> xi_seq;
    StatePoint limit_eta;
    StatePoint limit_xi;
    double gap = 0.0;
    ClosednessVerdict verdict = ClosednessVerdict::inconclusive;
    std::string caveat = kSamplingCaveat;
};

/// Closed-graph probe for the lag t_star: follow xi_n in U(t, t-t_star; eta_n)
/// by nearest-point chaining, and measure the gap between the xi limit and the
/// image of the eta limit. A violation needs a converged chain and gap > tol;
/// a non-convergent generator yields an inconclusive verdict.
inline ClosednessWitness closedness_probe(const ProcessHandle& p, double t, double t_star,
                                          const EtaSequence& gen, double tol,
                                          int branch_budget = 1, std::uint64_t rng_seed = 0,
                                          double convergence_tol = 1e-9) {
    if (!(t_star > 0.0)) throw std::invalid_argument("closedness_probe: t_star <= 0");
    if (gen.etas.size() < 4) throw std::invalid_argument("closedness_probe: generator too short");

    ClosednessWitness w;
    w.t = t;
    w.t_star = t_star;
    w.eta_seq = gen.etas;
    w.limit_eta = gen.limit;

    for (std::size_t n = 0; n < gen.etas.size(); ++n) {
        const auto img = p.evolve(t, t - t_star, SampledSet({gen.etas[n]}), branch_budget,
                                  mix_seed(rng_seed, n));
        if (w.xi_seq.empty()) {
            w.xi_seq.push_back(img.points.front());
        } else {
            const StatePoint& prev = w.xi_seq.back();
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < img.points.size(); ++i) {
                const double d = p.metric(img.points[i], prev);
                if (d < bd) {
                    bd = d;
                    best = i;
                }
            }
            w.xi_seq.push_back(img.points[best]);
        }
    }
    w.limit_xi = w.xi_seq.back();

    const bool eta_converged =
        p.metric(gen.etas.back(), gen.limit) <= convergence_tol;
    bool xi_converged = true;
    const std::size_t quartile = (3 * w.xi_seq.size()) / 4;
    for (std::size_t n = quartile; n + 1 < w.xi_seq.size(); ++n)
        if (p.metric(w.xi_seq[n + 1], w.xi_seq[n]) > convergence_tol) xi_converged = false;

    const auto limit_img =
        p.evolve(t, t - t_star, SampledSet({gen.limit}), branch_budget, mix_seed(rng_seed, 9999));
    w.gap = dist_to_set(w.limit_xi, limit_img, p.metric);

    if (!eta_converged || !xi_converged)
        w.verdict = ClosednessVerdict::inconclusive;
    else
        w.verdict = w.gap > tol ? ClosednessVerdict::violation : ClosednessVerdict::pass;
    return w;
}

// ---------------------------------------------------------------------------
// Attractor construction and invariance
// ---------------------------------------------------------------------------

struct AttractorResult {
    NonautonomousSet attractor;
    std::vector<OmegaLimitResult> omegas;            // one per query time
    std::vector<AttractionResult> attraction_checks;  // one per (time, test set)
    std::string caveat = kSamplingCaveat;
};

/// A(t) = omega(t, B0(t)) per query time; the caller is responsible for having
/// classified B0 as monotonically absorbing first. Construction fails loudly
/// on the first non-converged omega limit.
inline AttractorResult attractor_construct(const ProcessHandle& p, const NonautonomousSet& B0,
                                           const std::vector<double>& times,
                                           const ScheduleSpec& sched, double cluster_eps,
                                           double tol = 1e-6, int branch_budget = 1,
                                           std::uint64_t rng_seed = 0,
                                           const std::vector<SampledSet>& test_sets = {}) {
    AttractorResult result;
    std::vector<SampledSet> sections;
    for (double t : times) {
        auto omega = omega_limit(p, t, B0.at(t), sched.build(t), cluster_eps, tol, branch_budget,
                                 rng_seed);
        if (!omega.converged)
            throw std::runtime_error("attractor_construct: omega limit did not converge at t = " +
                                     std::to_string(t));
        SampledSet section = omega.limit_set;
        section.label = "A(" + std::to_string(t) + ")";
        sections.push_back(std::move(section));
        result.omegas.push_back(std::move(omega));
    }
    result.attractor = NonautonomousSet(times, std::move(sections));
    for (const auto& E : test_sets)
        for (double t : times)
            result.attraction_checks.push_back(attraction_test(p, result.attractor, E, t,
                                                               sched.build(t), tol, branch_budget,
                                                               rng_seed));
    return result;
}

struct InvariancePair {
    double s = 0.0, t = 0.0;
    double negative_residual = 0.0;  // dist(A(t), U(t,s;A(s)))
    double full_residual = 0.0;      // dist(U(t,s;A(s)), A(t))
    bool negatively_invariant = false;
    bool fully_invariant = false;
};

struct InvarianceReport {
    std::vector<InvariancePair> pairs;
    bool negatively_invariant = false;
    bool fully_invariant = false;
    double tol = 0.0;
    std::string caveat = kSamplingCaveat;
};

/// Negative invariance A(t) c U(t,s;A(s)) and the reverse inclusion, both as
/// semidistance residuals at tolerance tol.
inline InvarianceReport invariance_check(const ProcessHandle& p, const NonautonomousSet& A,
                                         const std::vector<std::pair<double, double>>& pairs,
                                         double tol = 1e-6, int branch_budget = 1,
                                         std::uint64_t rng_seed = 0) {
    InvarianceReport report;
    report.tol = tol;
    report.negatively_invariant = true;
    report.fully_invariant = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [s, t] = pairs[i];
        if (!(s <= t)) throw std::invalid_argument("invariance_check: needs s <= t");
        InvariancePair row;
        row.s = s;
        row.t = t;
        const auto image = p.evolve(t, s, A.at(s), branch_budget, mix_seed(rng_seed, i));
        row.negative_residual = semidistance(A.at(t), image, p.metric);
        row.full_residual = semidistance(image, A.at(t), p.metric);
        row.negatively_invariant = row.negative_residual <= tol;
        row.fully_invariant = row.negatively_invariant && row.full_residual <= tol;
        report.negatively_invariant &= row.negatively_invariant;
        report.fully_invariant &= row.fully_invariant;
        report.pairs.push_back(std::move(row));
    }
    return report;
}

}  // namespace pullback
