#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "pullback/diagnostics.hpp"
#include "pullback/sampling.hpp"
#include "pullback/systems.hpp"

using namespace pullback;

namespace {

const double kPi = std::acos(-1.0);
const double kV1Norm = std::sqrt(kPi / 2.0);  // ||v^1||_H

SampledSet two_point_attractor(std::size_t N, std::string label = "A") {
    std::vector<double> zero(N, 0.0), minus_v1(N, 0.0);
    minus_v1[0] = -1.0;
    return SampledSet({StatePoint(zero), StatePoint(minus_v1)}, std::move(label));
}

}  // namespace

// ---------------------------------------------------------------------------
// check_axioms
// ---------------------------------------------------------------------------

TEST_CASE("check_axioms: heat-switch semigroup is strict to rounding") {
    const auto p = systems::make_heat_switch_process(8);
    std::vector<AxiomProbe> probes;
    SplitMix64 rng(13);
    for (int i = 0; i < 10; ++i) {
        std::vector<double> c(8);
        for (auto& v : c) v = rng.uniform(-2, 2);
        probes.push_back({1.5, 0.25, -1.0, StatePoint(c)});
        probes.push_back({0.0, -0.5, -2.5, StatePoint(std::vector<double>(8, 0.1))});
    }
    const auto report = check_axioms(p, probes, 1e-9);
    CHECK(report.identity_ok);
    CHECK(report.max_identity == 0.0);  // axiom (i) is structural
    CHECK(report.subcomposition_ok);
    CHECK(report.strict_ok);
    CHECK(report.max_subcomposition <= 1e-9);
}

TEST_CASE("check_axioms: planar semigroup residuals vanish") {
    const auto p = systems::make_planar_process();
    std::vector<AxiomProbe> probes{{2.0, 1.0, 0.0, StatePoint{0.5, 1.5}},
                                   {3.0, 0.5, -1.0, StatePoint{0.0, 2.0}},
                                   {1.0, 1.0, 1.0, StatePoint{1.0, 0.0}}};
    const auto report = check_axioms(p, probes, 1e-12);
    CHECK(report.identity_ok);
    CHECK(report.subcomposition_ok);
    CHECK(report.strict_ok);
}

TEST_CASE("check_axioms: drift trajectories forget intermediate stops") {
    // The composition through an interior time lands at {t-s}, not {t-tau};
    // residuals are reported rather than hidden.
    const auto p = systems::make_drift_process();
    const auto report = check_axioms(p, {{2.0, 1.0, 0.0, StatePoint{5.0}}}, 1e-9);
    CHECK(report.identity_ok);
    CHECK_FALSE(report.subcomposition_ok);
    CHECK(report.max_subcomposition == Catch::Approx(1.0));
}

// ---------------------------------------------------------------------------
// attraction_test
// ---------------------------------------------------------------------------

TEST_CASE("attraction_test: heat-switch ball is pulled onto the two points") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    const auto K = NonautonomousSet::constant({0.0}, two_point_attractor(N));
    const auto B = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 2.0, 16, 3,
                               Metric::sine_modes(), "B");
    const auto res = attraction_test(p, K, B, 0.0, TauSchedule::geometric(0.0), 1e-6);
    CHECK(res.attracted);
    // Exponential decay shows as a strictly decreasing curve head.
    CHECK(res.curve[1].second < res.curve[0].second);
    CHECK_THROWS_AS(attraction_test(p, K, B, 0.5, TauSchedule::geometric(0.5)),
                    std::out_of_range);
}

TEST_CASE("attraction_test: a family containing all images attracts at distance zero") {
    const std::size_t N = 4;
    const auto p = systems::make_heat_switch_process(N);
    const auto B = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 1.0, 8, 5,
                               Metric::sine_modes(), "B");
    const auto sched = TauSchedule::geometric(0.0, 1.0, 1.5, 12);
    std::vector<StatePoint> all;
    for (std::size_t n = 0; n < sched.size(); ++n) {
        const auto img = p.evolve(0.0, sched.taus[n], B);
        all.insert(all.end(), img.points.begin(), img.points.end());
    }
    const auto K = NonautonomousSet::constant({0.0}, SampledSet(all, "hull"));
    const auto res = attraction_test(p, K, B, 0.0, sched, 1e-6);
    CHECK(res.attracted);
    for (const auto& [tau, d] : res.curve) CHECK(d == 0.0);
}

TEST_CASE("attraction_test: drift is attracted by no bounded family") {
    const auto p = systems::make_drift_process();
    const auto K = NonautonomousSet::constant(
        {0.0}, sample_grid({-50.0}, {50.0}, {101}, "bounded"));
    const auto res = attraction_test(p, K, SampledSet({StatePoint{0.0}}, "B"), 0.0,
                                     TauSchedule::geometric(0.0, 1.0, 1.6, 16), 1e-6);
    CHECK_FALSE(res.attracted);
}

// ---------------------------------------------------------------------------
// dissipativity_classify
// ---------------------------------------------------------------------------

TEST_CASE("dissipativity: heat-switch entering times obey the log bound") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    const auto candidate = NonautonomousSet::constant({0.0}, two_point_attractor(N));
    for (const double eps : {0.1, 0.01}) {
        std::vector<SampledSet> test_sets;
        for (const double rho : {1.0, 10.0})
            test_sets.push_back(sample_ball(StatePoint(std::vector<double>(N, 0.0)), rho, 24,
                                            17, Metric::sine_modes(),
                                            "ball-rho-" + std::to_string(rho)));
        const auto report =
            dissipativity_classify(p, candidate, test_sets, {0.0},
                                   ScheduleSpec::linear(0.5, 60), eps);
        CHECK(report.absorbing);
        CHECK(report.monotone);
        CHECK(report.backward_bounded);
        CHECK(report.point_dissipative);
        for (const auto& row : report.entering_times) {
            REQUIRE(row.absorbed);
            const double rho = row.label.find("10.0") != std::string::npos ? 10.0 : 1.0;
            const double t_B = 2.0 * std::log((rho + kV1Norm) / eps);
            CHECK(row.elapsed <= t_B);
        }
    }
}

TEST_CASE("dissipativity: shift enters the unit ball exactly at the support length") {
    const std::size_t N = 16;
    const auto p = systems::make_shift_process(N);
    auto ball = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 1.0, 32, 23,
                            Metric::euclidean(), "unit-ball");
    const auto candidate = NonautonomousSet::constant({0.0}, ball);
    for (std::size_t support : {3u, 7u, 12u}) {
        std::vector<double> c(N, 0.0);
        c[support - 1] = 2.0;  // support in the first `support` coordinates
        const auto report = dissipativity_classify(
            p, candidate, {SampledSet({StatePoint(c)}, "spike")}, {0.0},
            ScheduleSpec::linear(1.0, 2 * N), 1e-9);
        REQUIRE(report.entering_times.size() == 1);
        REQUIRE(report.entering_times[0].absorbed);
        CHECK(report.entering_times[0].elapsed == static_cast<double>(support));
    }
}

TEST_CASE("dissipativity: planar candidate box is escaped by the witness row") {
    const auto p = systems::make_planar_process();
    const double M = 1.0;
    const auto candidate =
        NonautonomousSet::constant({0.0}, sample_grid({0.0, 0.0}, {1.0, M}, {21, 21}, "B_M"));
    const auto K_M = sample_grid({0.0, 2.0 * M}, {1.0, 2.0 * M}, {21, 1}, "K_M");
    const auto report = dissipativity_classify(p, candidate, {K_M}, {0.0},
                                               ScheduleSpec::linear(1.0, 10), 1e-6);
    // The flat row never settles inside the box within the verdict horizon,
    // yet every single point of it is eventually absorbed.
    CHECK_FALSE(report.absorbing);
    CHECK(report.point_dissipative);
    CHECK(report.monotone);
    CHECK(report.backward_bounded);
}

TEST_CASE("dissipativity: monotone verdicts imply backward boundedness") {
    // Proposition 3.4 coherence on a genuinely nested time-dependent family:
    // each section extends the previous one by a larger shell of samples.
    const std::size_t N = 4;
    const auto p = systems::make_heat_switch_process(N);
    std::vector<double> times{-1.0, 0.0, 1.0};
    std::vector<SampledSet> sets;
    std::vector<StatePoint> grown;
    for (double t : times) {
        const auto shell = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 2.0 + 0.5 * t,
                                       16, 31, Metric::sine_modes(), "shell");
        grown.insert(grown.end(), shell.points.begin(), shell.points.end());
        sets.push_back(SampledSet(grown, "nested"));
    }
    const NonautonomousSet candidate(times, sets);
    const auto B = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 1.0, 8, 37,
                               Metric::sine_modes(), "B");
    // Tolerance at the spoke resolution of the sampled sections.
    const auto report = dissipativity_classify(p, candidate, {B}, {0.0},
                                               ScheduleSpec::geometric(), 0.35);
    REQUIRE(report.monotone);  // nested point sets give semidistance exactly 0
    CHECK(report.backward_bounded);
    CHECK(report.absorbing);
}

// ---------------------------------------------------------------------------
// point_dissipativity_test
// ---------------------------------------------------------------------------

TEST_CASE("point dissipativity: planar entering times are the exact hitting times") {
    const auto p = systems::make_planar_process();
    const auto candidate = sample_grid({0.0, 0.0}, {1.0, 0.0}, {41, 1}, "rest-edge");
    std::vector<double> sample_times;
    for (int i = 1; i <= 64; ++i) sample_times.push_back(i * 0.25);

    const std::vector<StatePoint> points{{0.5, 1.0}, {0.25, 2.0}, {0.0, 3.0}, {1.0, 0.5}};
    const auto report =
        point_dissipativity_test(p, candidate, points, sample_times, 1e-9);
    REQUIRE(report.point_dissipative);
    // (x0, y0) hits rest at y0/x0; the x0 = 0 edge at y0.
    CHECK(report.rows[0].entering_time == Catch::Approx(2.0));
    CHECK(report.rows[1].entering_time == Catch::Approx(8.0));
    CHECK(report.rows[2].entering_time == Catch::Approx(3.0));
    CHECK(report.rows[3].entering_time == Catch::Approx(0.5));
}

TEST_CASE("point dissipativity: shift spike enters at the support length") {
    const std::size_t N = 16;
    const auto p = systems::make_shift_process(N);
    const auto candidate = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 1.0, 24, 41,
                                       Metric::euclidean(), "unit-ball");
    std::vector<double> sample_times;
    for (std::size_t i = 1; i <= N; ++i) sample_times.push_back(static_cast<double>(i));
    for (std::size_t k : {2u, 5u, 9u}) {
        std::vector<double> c(N, 0.0);
        c[k] = 2.0;  // 2R e_{k+1}
        const auto report = point_dissipativity_test(p, candidate, {StatePoint(c)},
                                                     sample_times, 1e-9);
        REQUIRE(report.point_dissipative);
        CHECK(report.rows[0].entering_time == static_cast<double>(k + 1));
    }
}

TEST_CASE("point dissipativity: rejects non-semiflow processes") {
    auto p = systems::make_heat_switch_process(4);
    p.kind = ProcessKind::general;
    CHECK_THROWS_AS(point_dissipativity_test(p, two_point_attractor(4), {StatePoint{0, 0, 0, 0}},
                                             {1.0}),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// flattening_test
// ---------------------------------------------------------------------------

TEST_CASE("flattening: heat-switch tails die at the mode-2 rate") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    SplitMix64 rng(51);
    std::vector<StatePoint> pts;
    double initial_tail = 0.0;
    for (int i = 0; i < 12; ++i) {
        std::vector<double> c(N);
        for (auto& v : c) v = rng.uniform(-2, 2);
        const StatePoint pt(c);
        initial_tail = std::max(initial_tail, Metric::sine_modes().tail_norm(pt, 1));
        pts.push_back(pt);
    }
    const SampledSet B(pts, "B");
    // All scheduled start times at least 5 in the past: modes k >= 2 decay at
    // rate k^2 >= 4, so the tail shrinks by at least e^{-20}.
    const auto res = flattening_test(p, B, 0.0, 1, TauSchedule::linear(0.0, 5.0, 4));
    CHECK(res.sup_tail <= std::exp(-20.0) * initial_tail * (1.0 + 1e-12));
}

TEST_CASE("flattening: zero tails stay zero") {
    const std::size_t N = 6;
    const auto p = systems::make_heat_switch_process(N);
    std::vector<double> c(N, 0.0);
    c[0] = 1.5;
    const auto res = flattening_test(p, SampledSet({StatePoint(c)}), 0.0, 1,
                                     TauSchedule::geometric(0.0));
    CHECK(res.sup_tail == 0.0);
}

TEST_CASE("flattening: truncation index must stay below the dimension") {
    const auto p = systems::make_heat_switch_process(4);
    const SampledSet B({StatePoint{1.0, 0.0, 0.0, 0.0}});
    CHECK_THROWS_AS(flattening_test(p, B, 0.0, 4, TauSchedule::geometric(0.0)),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// closedness_probe
// ---------------------------------------------------------------------------

TEST_CASE("closedness: heat-switch violates the closed graph across the switching line") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    std::vector<double> w(N, 0.0), e1(N, 0.0);
    w[1] = 0.3;  // alpha(w) = 0, so the limit runs the minus regime
    e1[0] = 1.0;
    const auto gen = EtaSequence::geometric_approach(StatePoint(w), StatePoint(e1));
    for (const double t_star : {0.5, 1.0, 2.0}) {
        const auto witness = closedness_probe(p, 0.0, t_star, gen, 1e-6);
        CHECK(witness.verdict == ClosednessVerdict::violation);
        CHECK(witness.gap ==
              Catch::Approx(kV1Norm * (1.0 - std::exp(-t_star))).margin(1e-6));
    }
}

TEST_CASE("closedness: planar graph is closed for no positive lag") {
    const auto p = systems::make_planar_process();
    const double y0 = 1.0;
    const auto gen = EtaSequence::geometric_approach(StatePoint{0.0, y0}, StatePoint{1.0, 0.0});
    for (const double t_star : {0.5, 1.0, 2.0}) {
        const auto witness = closedness_probe(p, 0.0, t_star, gen, 1e-6);
        CHECK(witness.verdict == ClosednessVerdict::violation);
        CHECK(witness.gap == Catch::Approx(std::min(t_star, y0)).margin(1e-9));
    }
}

TEST_CASE("closedness: the plain heat semigroup passes") {
    const std::size_t N = 6;
    const auto p = systems::make_pure_heat_process(N);
    std::vector<double> w(N, 0.0), dir(N, 0.0);
    w[0] = 0.5;
    w[2] = -0.25;
    dir[1] = 1.0;
    const auto gen = EtaSequence::geometric_approach(StatePoint(w), StatePoint(dir));
    const auto witness = closedness_probe(p, 1.0, 1.0, gen, 1e-9);
    CHECK(witness.verdict == ClosednessVerdict::pass);
}

TEST_CASE("closedness: a non-convergent generator is inconclusive") {
    const auto p = systems::make_planar_process();
    EtaSequence gen;
    gen.limit = StatePoint{0.5, 1.0};
    for (int i = 0; i < 12; ++i)
        gen.etas.push_back(StatePoint{i % 2 == 0 ? 0.1 : 0.9, 1.0});
    const auto witness = closedness_probe(p, 0.0, 1.0, gen, 1e-6);
    CHECK(witness.verdict == ClosednessVerdict::inconclusive);
}

// ---------------------------------------------------------------------------
// attractor_construct and invariance_check
// ---------------------------------------------------------------------------

TEST_CASE("attractor: heat-switch construction finds the two points at every time") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    const std::vector<double> times{-1.0, 0.0, 1.0};
    const auto B0 = NonautonomousSet::constant(
        times, sample_ball(StatePoint(std::vector<double>(N, 0.0)), 2.0, 24, 7,
                           Metric::sine_modes(), "B0"));
    const auto result = attractor_construct(p, B0, times, ScheduleSpec::geometric(), 0.5);
    const auto exact = two_point_attractor(N);
    for (const auto& section : result.attractor.sets) {
        REQUIRE(section.size() == 2);
        CHECK(hausdorff(section, exact, p.metric) <= 1e-6);
    }
}

TEST_CASE("attractor: pure heat collapses to the origin") {
    const std::size_t N = 4;
    const auto p = systems::make_pure_heat_process(N);
    const auto B0 = NonautonomousSet::constant(
        {0.0}, sample_ball(StatePoint(std::vector<double>(N, 0.0)), 1.5, 12, 9,
                           Metric::sine_modes(), "B0"));
    const auto result = attractor_construct(p, B0, {0.0}, ScheduleSpec::geometric(), 0.25);
    REQUIRE(result.attractor.sets[0].size() == 1);
    CHECK(p.metric.norm(result.attractor.sets[0].points[0]) <= 1e-9);
}

TEST_CASE("attractor: construction fails loudly when omega limits diverge") {
    const auto p = systems::make_drift_process();
    const auto B0 = NonautonomousSet::constant({0.0}, SampledSet({StatePoint{0.0}}, "B0"));
    CHECK_THROWS_AS(attractor_construct(p, B0, {0.0}, ScheduleSpec::geometric(), 0.5),
                    std::runtime_error);
}

TEST_CASE("attractor: minimal among families that pass the attraction test") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    const auto B0 = NonautonomousSet::constant(
        {0.0}, sample_ball(StatePoint(std::vector<double>(N, 0.0)), 2.0, 24, 7,
                           Metric::sine_modes(), "B0"));
    const auto result = attractor_construct(p, B0, {0.0}, ScheduleSpec::geometric(), 0.5);
    const auto& A0 = result.attractor.sets[0];

    std::vector<double> zero(N, 0.0), minus_v1(N, 0.0), spare(N, 0.0);
    minus_v1[0] = -1.0;
    spare[0] = 2.0;
    const std::vector<SampledSet> competitors{
        SampledSet({StatePoint(zero), StatePoint(minus_v1)}, "exact"),
        SampledSet({StatePoint(zero), StatePoint(minus_v1), StatePoint(spare)}, "superset"),
        SampledSet({StatePoint(zero)}, "origin-only"),
        SampledSet({StatePoint(minus_v1)}, "minus-only")};
    const auto B = sample_ball(StatePoint(std::vector<double>(N, 0.0)), 1.5, 16, 11,
                               Metric::sine_modes(), "test");
    int passing = 0;
    for (const auto& C : competitors) {
        const auto K = NonautonomousSet::constant({0.0}, C);
        const auto attr = attraction_test(p, K, B, 0.0, TauSchedule::geometric(0.0), 1e-6);
        if (attr.attracted) {
            ++passing;
            CHECK(semidistance(A0, C, p.metric) <= 1e-6);
        }
    }
    CHECK(passing == 2);  // the exact family and its superset; the halves fail

    // A(t) stays inside the closure of the absorbing family it came from,
    // up to the spoke resolution of the ball sampling.
    CHECK(semidistance(A0, B0.sets[0], p.metric) <= 0.35);
}

TEST_CASE("invariance: heat-switch attractor is not negatively invariant") {
    const std::size_t N = 8;
    const auto p = systems::make_heat_switch_process(N);
    const auto A = NonautonomousSet::constant({0.0, 1.0}, two_point_attractor(N));
    const auto report = invariance_check(p, A, {{0.0, 1.0}}, 1e-6);
    CHECK_FALSE(report.negatively_invariant);
    CHECK(report.pairs[0].negative_residual >= 0.5 * kV1Norm);
}

TEST_CASE("invariance: the origin is a fixed point of the pure heat flow") {
    const std::size_t N = 4;
    const auto p = systems::make_pure_heat_process(N);
    const auto A =
        NonautonomousSet::constant({0.0, 1.0, 2.0},
                                   SampledSet({StatePoint(std::vector<double>(N, 0.0))}, "A"));
    const auto report = invariance_check(p, A, {{0.0, 1.0}, {0.0, 2.0}, {1.0, 2.0}}, 1e-12);
    CHECK(report.negatively_invariant);
    CHECK(report.fully_invariant);
    for (const auto& row : report.pairs) {
        CHECK(row.negative_residual == 0.0);
        CHECK(row.full_residual == 0.0);
    }
}

// ---------------------------------------------------------------------------
// The discriminating planar suite: all five verdicts at once
// ---------------------------------------------------------------------------

TEST_CASE("planar quintuple: point-dissipative, asymptotically compact, strict, "
          "not dissipative, not closed") {
    const auto p = systems::make_planar_process();
    const double M = 1.0;

    // 1. point-dissipative with exact entering times (separate horizon).
    const auto rest = sample_grid({0.0, 0.0}, {1.0, 0.0}, {41, 1}, "rest");
    std::vector<double> ts;
    for (int i = 1; i <= 80; ++i) ts.push_back(0.25 * i);
    const auto pd = point_dissipativity_test(p, rest, {StatePoint{0.5, 1.0}}, ts, 1e-9);
    CHECK(pd.point_dissipative);
    CHECK(pd.rows[0].entering_time == Catch::Approx(2.0));

    // 2. asymptotically compact: omega limits converge on box grids.
    for (double m : {1.0, 2.0}) {
        const auto B = sample_grid({0.0, 0.0}, {1.0, m}, {11, 11}, "box");
        const auto omega = omega_limit(p, 0.0, B, TauSchedule::linear(0.0, 2.0, 24), 0.15);
        CHECK(omega.converged);
    }

    // 3. strict semigroup.
    const auto ax = check_axioms(p, {{3.0, 1.5, 0.0, StatePoint{0.3, 2.0}}}, 1e-12);
    CHECK(ax.strict_ok);

    // 4. not dissipative: the doubled row escapes the candidate box.
    const auto candidate =
        NonautonomousSet::constant({0.0}, sample_grid({0.0, 0.0}, {1.0, M}, {21, 21}, "B_M"));
    const auto K_M = sample_grid({0.0, 2.0 * M}, {1.0, 2.0 * M}, {21, 1}, "K_M");
    const auto diss = dissipativity_classify(p, candidate, {K_M}, {0.0},
                                             ScheduleSpec::linear(1.0, 10), 1e-6);
    CHECK_FALSE(diss.absorbing);
    CHECK(diss.point_dissipative);

    // 5. closed for no positive lag.
    const auto gen =
        EtaSequence::geometric_approach(StatePoint{0.0, 1.0}, StatePoint{1.0, 0.0});
    for (const double t_star : {0.5, 1.0, 2.0})
        CHECK(closedness_probe(p, 0.0, t_star, gen, 1e-6).verdict ==
              ClosednessVerdict::violation);
}
