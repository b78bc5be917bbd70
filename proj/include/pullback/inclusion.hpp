#pragma once

// Spectral Galerkin solver for the reaction-diffusion inclusion
//   u_t - u_xx + dj(x,t,u) ∋ f0(x,t)   on (0,pi), Dirichlet boundary,
// where dj is the interval hull [h(s-), h(s+)] of a possibly discontinuous
// scalar nonlinearity. States are coefficients against sin(k x); mode k has
// eigenvalue k^2 and ||sin(k x)||_H^2 = pi/2. The multivalued image is sampled
// through (mollifier width, jump-selection theta) ensembles.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pullback/process.hpp"
#include "pullback/state.hpp"
#include "pullback/util.hpp"

namespace pullback::inclusion {

inline constexpr double kLambda1 = 1.0;

inline double domain_pi() { return std::acos(-1.0); }

// ---------------------------------------------------------------------------
// Problem data
// ---------------------------------------------------------------------------

/// Scalar reaction term h(x,t,s), possibly discontinuous in s. `h` gives the
/// off-jump values; one-sided limits at the jump points drive the selections.
/// Growth (J2): |h| <= c1 + c2|s|. Sign (J3): h(s) s >= d1 - d2 s^2 with
/// d2 in [0, lambda_1).
struct Nonlinearity {
    std::string name;
    std::function<double(double x, double t, double s)> h;
    std::function<std::vector<double>(double x, double t)> jump_points;
    std::function<double(double x, double t, double s)> h_left;
    std::function<double(double x, double t, double s)> h_right;
    double c1 = 0.0, c2 = 0.0;
    double d1 = 0.0, d2 = 0.0;

    /// Selection value: theta interpolates the jump hull, plain h elsewhere.
    double select(double x, double t, double s, double theta) const {
        for (double j : jump_points(x, t))
            if (s == j) return (1.0 - theta) * h_left(x, t, s) + theta * h_right(x, t, s);
        return h(x, t, s);
    }
};

inline Nonlinearity heaviside_nonlinearity() {
    Nonlinearity nl;
    nl.name = "heaviside";
    nl.h = [](double, double, double s) { return s > 0.0 ? 1.0 : 0.0; };
    nl.jump_points = [](double, double) { return std::vector<double>{0.0}; };
    nl.h_left = [](double, double, double) { return 0.0; };
    nl.h_right = [](double, double, double) { return 1.0; };
    nl.c1 = 1.0;
    nl.c2 = 0.0;
    nl.d1 = 0.0;
    nl.d2 = 0.0;
    return nl;
}

/// lambda sin(s) + H(s - 1); lambda < lambda_1 keeps (J3) with d2 = lambda.
inline Nonlinearity sine_plus_heaviside_nonlinearity(double lambda = 0.5) {
    if (!(lambda >= 0.0 && lambda < kLambda1))
        throw std::invalid_argument("sine_plus_heaviside: lambda must sit in [0, lambda_1)");
    Nonlinearity nl;
    nl.name = "sine-plus-heaviside";
    nl.h = [lambda](double, double, double s) {
        return lambda * std::sin(s) + (s > 1.0 ? 1.0 : 0.0);
    };
    nl.jump_points = [](double, double) { return std::vector<double>{1.0}; };
    nl.h_left = [lambda](double, double, double s) { return lambda * std::sin(s); };
    nl.h_right = [lambda](double, double, double s) { return lambda * std::sin(s) + 1.0; };
    nl.c1 = lambda + 1.0;
    nl.c2 = 0.0;
    nl.d1 = 0.0;
    nl.d2 = lambda;
    return nl;
}

struct GrowthViolation {
    double x, t, s, value, bound;
};

/// Sample (J2) and (J3) on a grid, including both hull endpoints at jumps.
inline std::vector<GrowthViolation> validate_nonlinearity(
    const Nonlinearity& nl, const std::vector<double>& s_grid,
    const std::vector<double>& x_grid, const std::vector<double>& t_grid) {
    std::vector<GrowthViolation> violations;
    auto check = [&](double x, double t, double s, double value) {
        const double growth = nl.c1 + nl.c2 * std::abs(s);
        if (std::abs(value) > growth + 1e-12)
            violations.push_back({x, t, s, std::abs(value), growth});
        const double sign = nl.d1 - nl.d2 * s * s;
        if (value * s < sign - 1e-12) violations.push_back({x, t, s, value * s, sign});
    };
    for (double t : t_grid)
        for (double x : x_grid) {
            for (double s : s_grid) check(x, t, s, nl.h(x, t, s));
            for (double j : nl.jump_points(x, t)) {
                check(x, t, j, nl.h_left(x, t, j));
                check(x, t, j, nl.h_right(x, t, j));
            }
        }
    return violations;
}

/// Source term f0(x,t) with the (F2) horizon: ||f||_{L^inf(-inf, t_bar; V*)}
/// is finite and equals sup_past.
struct Forcing {
    std::string name;
    std::function<double(double x, double t)> f0;
    double t_bar = 0.0;
    double sup_past = 0.0;
};

inline Forcing zero_forcing() {
    Forcing f;
    f.name = "zero";
    f.f0 = [](double, double) { return 0.0; };
    return f;
}

/// a sin(x), constant in time; ||f(t)||_{V*} = a sqrt(pi/2).
inline Forcing constant_sine_forcing(double amplitude = 1.0) {
    Forcing f;
    f.name = "constant-sine";
    f.f0 = [amplitude](double x, double) { return amplitude * std::sin(x); };
    f.sup_past = std::abs(amplitude) * std::sqrt(domain_pi() / 2.0);
    return f;
}

/// a sin(x) (1 + sin t); bounded for all time, so any t_bar works.
inline Forcing sine_pulse_forcing(double amplitude = 1.0, double t_bar = 0.0) {
    Forcing f;
    f.name = "sine-pulse";
    f.f0 = [amplitude](double x, double t) { return amplitude * std::sin(x) * (1.0 + std::sin(t)); };
    f.t_bar = t_bar;
    f.sup_past = 2.0 * std::abs(amplitude) * std::sqrt(domain_pi() / 2.0);
    return f;
}

// ---------------------------------------------------------------------------
// Mollification and ensemble designs
// ---------------------------------------------------------------------------

/// Convolution of h(x,t,.) with the symmetric bump kernel of width
/// 1/n_moll, by self-normalized midpoint quadrature (64 panels, nodes avoid
/// the jump set). Smooth in s; keeps (J2) with constants independent of
/// n_moll.
inline double mollified_h(const Nonlinearity& nl, int n_moll, double x, double t, double s) {
    if (n_moll < 1) throw std::invalid_argument("mollified_h: n_moll >= 1 required");
    constexpr int kPanels = 64;
    struct Kernel {
        double eta[kPanels];
        double rho[kPanels];
        double total = 0.0;
        Kernel() {
            for (int i = 0; i < kPanels; ++i) {
                eta[i] = -1.0 + (2.0 * i + 1.0) / kPanels;
                rho[i] = std::exp(-1.0 / (1.0 - eta[i] * eta[i]));
                total += rho[i];
            }
        }
    };
    static const Kernel kernel;
    double num = 0.0;
    for (int i = 0; i < kPanels; ++i)
        num += kernel.rho[i] * nl.h(x, t, s - kernel.eta[i] / n_moll);
    return num / kernel.total;
}

/// One ensemble member: mollifier index 0 means the raw selection h_theta,
/// positive means the width-1/n mollification (theta then plays no role).
struct MemberDesign {
    int mollifier_index = 0;
    double theta = 0.5;

    double evaluate(const Nonlinearity& nl, double x, double t, double s) const {
        if (mollifier_index == 0) return nl.select(x, t, s, theta);
        return mollified_h(nl, mollifier_index, x, t, s);
    }
};

/// Deterministic design of (mollifier, theta) pairs: the mollifier ladder
/// position depends only on the branch index, so a trajectory continued in
/// two legs finds a same-mollifier continuation; theta is seed-scrambled.
inline MemberDesign member_design(std::uint64_t rng_seed, std::size_t seed_index,
                                  std::size_t branch) {
    static constexpr int kLadder[6] = {0, 8, 16, 32, 64, 128};
    MemberDesign d;
    d.mollifier_index = kLadder[branch % 6];
    SplitMix64 rng(mix_seed(rng_seed, seed_index * 1315423911ULL + branch));
    d.theta = rng.uniform();
    return d;
}

// ---------------------------------------------------------------------------
// Galerkin system
// ---------------------------------------------------------------------------

struct SolverConfig {
    std::size_t modes = 8;
    double dt = 1e-3;
    int mollifier_index = 0;     // default member when no ensemble is drawn
    double selection_theta = 0.5;
    std::size_t quad_points = 0;  // 0: use 8 * modes
    double blowup_cap = 1e6;      // H-norm guard

    std::size_t effective_quad() const { return quad_points == 0 ? 8 * modes : quad_points; }

    void validate() const {
        if (modes < 1) throw std::invalid_argument("SolverConfig: modes >= 1");
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt > 0");
        if (effective_quad() < 4 * modes)
            throw std::invalid_argument("SolverConfig: quad_points >= 4*modes");
        if (!(selection_theta >= 0.0 && selection_theta <= 1.0))
            throw std::invalid_argument("SolverConfig: selection_theta in [0,1]");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StatePoint> states;
    std::vector<double> h_norms;

    const StatePoint& endpoint() const { return states.back(); }

    const StatePoint& at_time(double t, double tol = 1e-9) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) <= tol) return states[i];
        throw std::out_of_range("Trajectory: time not on the stored grid");
    }
};

class GalerkinSystem {
  public:
    GalerkinSystem(SolverConfig cfg, Nonlinearity nl, Forcing forcing)
        : cfg_(cfg), nl_(std::move(nl)), forcing_(std::move(forcing)) {
        cfg_.validate();
        const std::size_t q = cfg_.effective_quad();
        const double pi = domain_pi();
        // Composite 4-point Gauss-Legendre on (0, pi).
        static const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
        static const double gl_w[4] = {0.3478548451374538, 0.6521451548625461,
                                       0.6521451548625461, 0.3478548451374538};
        const std::size_t panels = (q + 3) / 4;
        const double width = pi / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = (static_cast<double>(p) + 0.5) * width;
            for (int g = 0; g < 4; ++g) {
                nodes_.push_back(mid + 0.5 * width * gl_x[g]);
                weights_.push_back(0.5 * width * gl_w[g]);
            }
        }
        basis_.resize(cfg_.modes);
        for (std::size_t k = 0; k < cfg_.modes; ++k) {
            basis_[k].resize(nodes_.size());
            for (std::size_t i = 0; i < nodes_.size(); ++i)
                basis_[k][i] = std::sin(static_cast<double>(k + 1) * nodes_[i]);
        }
    }

    const SolverConfig& config() const { return cfg_; }
    const Nonlinearity& nonlinearity() const { return nl_; }
    const Forcing& forcing() const { return forcing_; }
    static double lambda(std::size_t k) { return static_cast<double>((k + 1) * (k + 1)); }

    /// Right-hand side g_k = (2/pi)(f_k - h_k) of a_k' = -k^2 a_k + g_k.
    std::vector<double> rhs(double t, const StatePoint& u, const MemberDesign& member) const {
        const std::size_t n = cfg_.modes;
        std::vector<double> g(n, 0.0);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            double ux = 0.0;
            for (std::size_t k = 0; k < n; ++k) ux += u.coords[k] * basis_[k][i];
            const double integrand =
                forcing_.f0(nodes_[i], t) - member.evaluate(nl_, nodes_[i], t, ux);
            if (!std::isfinite(integrand))
                throw std::runtime_error("GalerkinSystem: non-finite quadrature integrand");
            const double wi = weights_[i] * integrand;
            for (std::size_t k = 0; k < n; ++k) g[k] += wi * basis_[k][i];
        }
        const double scale = 2.0 / domain_pi();
        for (auto& v : g) v *= scale;
        return g;
    }

    /// One step of the first-order splitting: exact linear propagator per
    /// mode, nonlinear and forcing terms explicit through phi_1.
    StatePoint step(double t, const StatePoint& u, double dt, const MemberDesign& member) const {
        const auto g = rhs(t, u, member);
        std::vector<double> next(cfg_.modes);
        for (std::size_t k = 0; k < cfg_.modes; ++k) {
            const double z = lambda(k) * dt;
            const double decay = std::exp(-z);
            const double phi1 = z > 1e-12 ? (1.0 - decay) / z : 1.0 - z / 2.0;
            next[k] = decay * u.coords[k] + dt * phi1 * g[k];
        }
        return StatePoint(std::move(next));
    }

    /// Dense-output solve on the dt grid, concatenated across unit intervals
    /// the way the existence construction restarts its Galerkin problems.
    Trajectory solve(const StatePoint& u0, double t0, double T,
                     const MemberDesign& member) const {
        if (!(T > t0)) throw std::invalid_argument("solve_trajectory: T > t0 required");
        if (u0.dim() != cfg_.modes)
            throw std::invalid_argument("solve_trajectory: state dimension != modes");
        Trajectory traj;
        StatePoint u = u0;
        traj.times.push_back(t0);
        traj.states.push_back(u);
        traj.h_norms.push_back(h_norm(u));
        double chunk_start = t0;
        while (chunk_start < T - 1e-12) {
            const double chunk_end = std::min(chunk_start + 1.0, T);
            const auto steps =
                static_cast<std::size_t>(std::ceil((chunk_end - chunk_start) / cfg_.dt - 1e-9));
            for (std::size_t i = 0; i < steps; ++i) {
                const double t = chunk_start + static_cast<double>(i) * cfg_.dt;
                const double dt = std::min(cfg_.dt, chunk_end - t);
                u = step(t, u, dt, member);
                const double norm = h_norm(u);
                if (!(norm <= cfg_.blowup_cap))
                    throw std::runtime_error(
                        "solve_trajectory: H-norm exceeded the blow-up guard at t = " +
                        std::to_string(t + dt));
                traj.times.push_back(i + 1 == steps ? chunk_end : t + dt);
                traj.states.push_back(u);
                traj.h_norms.push_back(norm);
            }
            chunk_start = chunk_end;
        }
        return traj;
    }

    double h_norm(const StatePoint& u) const { return Metric::sine_modes().norm(u); }

    /// ||f(t)||_{V*}^2 = sum_k (pi/2) c_k^2 / lambda_k from the sine
    /// coefficients of f0(., t).
    double dual_norm_sq(double t) const {
        const std::size_t n = cfg_.modes;
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double ck = 0.0;
            for (std::size_t i = 0; i < nodes_.size(); ++i)
                ck += weights_[i] * forcing_.f0(nodes_[i], t) * basis_[k][i];
            ck *= 2.0 / domain_pi();
            total += (domain_pi() / 2.0) * ck * ck / lambda(k);
        }
        return total;
    }

  private:
    SolverConfig cfg_;
    Nonlinearity nl_;
    Forcing forcing_;
    std::vector<double> nodes_, weights_;
    std::vector<std::vector<double>> basis_;
};

/// Sampled multivalued image: for every seed, `budget` trajectories over the
/// deterministic (mollifier, theta) design; an under-approximation of
/// U(t, tau; seeds). Members run concurrently, gathered in design order.
inline SampledSet multivalued_evolve(const GalerkinSystem& sys, double t, double tau,
                                     const SampledSet& seeds, int budget,
                                     std::uint64_t rng_seed) {
    if (tau > t) throw std::invalid_argument("multivalued_evolve: tau > t");
    if (budget < 1) throw std::invalid_argument("multivalued_evolve: budget >= 1");
    const std::size_t total = seeds.size() * static_cast<std::size_t>(budget);
    std::vector<StatePoint> endpoints(total, StatePoint{0.0});
    std::exception_ptr failure;
    parallel_for(total, [&](std::size_t idx) {
        try {
            const std::size_t i = idx / static_cast<std::size_t>(budget);
            const std::size_t j = idx % static_cast<std::size_t>(budget);
            const auto member = member_design(rng_seed, i, j);
            endpoints[idx] = sys.solve(seeds.points[i], tau, t, member).endpoint();
        } catch (...) {
            failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return SampledSet(std::move(endpoints), "inclusion-image");
}

inline ProcessHandle make_inclusion_process(const SolverConfig& cfg, const Nonlinearity& nl,
                                            const Forcing& forcing) {
    auto sys = std::make_shared<GalerkinSystem>(cfg, nl, forcing);
    ProcessHandle p;
    p.kind = ProcessKind::strict;
    p.dimension = cfg.modes;
    p.metric = Metric::sine_modes();
    p.name = "inclusion";
    p.evolve_fn = [sys](double t, double tau, const SampledSet& seeds, int budget,
                        std::uint64_t rng_seed) {
        return multivalued_evolve(*sys, t, tau, seeds, budget, rng_seed);
    };
    return p;
}

// ---------------------------------------------------------------------------
// Energy and flattening certificates
// ---------------------------------------------------------------------------

/// Dissipative a priori estimate, with the constants produced by the explicit
/// test-function chain: eps = 1/2 - d2/(2 lambda_1), C1 = lambda_1 - d2,
/// C2 = 1/(2 eps), C3 any bound for -2 d1 m(Omega). R(t) is the absorbing
/// radius and tau_bar the entering time.
struct EnergyCertificate {
    double eps = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0;
    double t_bar = 0.0;
    double sup_past_sq = 0.0;
    std::function<double(double)> forcing_dual_norm_sq;

    /// Nondecreasing forcing envelope F(t) from the two-case split at t_bar.
    double F(double t) const {
        const double base = sup_past_sq / C1;
        if (t <= t_bar) return base;
        return base + exp_weighted_integral(t_bar, t);
    }

    double R(double t) const { return std::sqrt(C3 / C1 + C2 * F(t)) + 1.0; }

    double tau_bar(double t, double set_norm) const {
        double from_norm = std::numeric_limits<double>::infinity();
        if (set_norm > 0.0) from_norm = t - (2.0 / C1) * std::log(set_norm);
        return std::min({t - 1.0, from_norm, t_bar});
    }

    /// e^{-C1 t_bar} int_{t_bar}^t e^{C1 s} ||f(s)||^2 ds by composite Simpson.
    double exp_weighted_integral(double a, double b) const {
        if (b <= a) return 0.0;
        const int panels = 256;
        const double h = (b - a) / (2 * panels);
        auto g = [&](double s) { return std::exp(C1 * (s - a)) * forcing_dual_norm_sq(s); };
        double acc = g(a) + g(b);
        for (int i = 1; i < 2 * panels; ++i) acc += g(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return acc * h / 3.0;
    }
};

inline EnergyCertificate energy_certificate(const Nonlinearity& nl, const Forcing& forcing,
                                            std::function<double(double)> dual_norm_sq) {
    if (!(nl.d2 < kLambda1))
        throw std::invalid_argument("energy_certificate: J3 violated (d2 >= lambda_1)");
    EnergyCertificate cert;
    cert.eps = 0.5 - nl.d2 / (2.0 * kLambda1);
    cert.C1 = kLambda1 - nl.d2;
    cert.C2 = 1.0 / (2.0 * cert.eps);
    cert.C3 = std::max(-2.0 * nl.d1 * domain_pi(), 0.0) + 1e-12;
    cert.t_bar = forcing.t_bar;
    cert.sup_past_sq = forcing.sup_past * forcing.sup_past;
    cert.forcing_dual_norm_sq = std::move(dual_norm_sq);
    return cert;
}

/// Four-term tail-energy certificate at truncation m: the measured tail of
/// every ensemble endpoint against e^{-lambda_{m+1}} R^2(t) + growth/lambda
/// + the two forcing windows, provided the ensemble entered the absorbing
/// ball by time t - 2.
struct FlatteningCertificate {
    std::size_t m = 0;
    double measured_tail_sq = 0.0;
    double term_decay = 0.0;          // e^{-lambda_{m+1}} R^2(t)
    double term_growth = 0.0;         // (4 c2^2 R^2(t) + 4 c1^2 m(Omega)) / (lambda_1 lambda_{m+1})
    double term_forcing_window = 0.0; // 2 e^{-lambda_{m+1} delta} int_{t-2}^t ||f||^2
    double term_forcing_tail = 0.0;   // 2 int_{t-delta}^t ||f||^2
    bool holds = false;
    std::size_t m_recipe = 0;  // smallest m with the three m-terms <= eps/4

    double bound() const {
        return term_decay + term_growth + term_forcing_window + term_forcing_tail;
    }
};

inline FlatteningCertificate flattening_certificate(const GalerkinSystem& sys,
                                                    const std::vector<Trajectory>& ensemble,
                                                    std::size_t m, double t, double delta,
                                                    double eps, const EnergyCertificate& cert) {
    if (m >= sys.config().modes)
        throw std::invalid_argument("flattening_certificate: m out of range");
    if (ensemble.empty()) throw std::invalid_argument("flattening_certificate: empty ensemble");
    for (const auto& traj : ensemble) {
        const double start = traj.times.front();
        const double start_norm = traj.h_norms.front();
        if (start > cert.tau_bar(t - 2.0, std::max(start_norm, 1.0)) + 1e-9)
            throw std::invalid_argument(
                "flattening_certificate: ensemble not absorbed by t - 2 (start too late)");
    }

    auto plain_integral = [&](double a, double b) {
        if (b <= a) return 0.0;
        const int panels = 256;
        const double h = (b - a) / (2 * panels);
        double acc = cert.forcing_dual_norm_sq(a) + cert.forcing_dual_norm_sq(b);
        for (int i = 1; i < 2 * panels; ++i)
            acc += cert.forcing_dual_norm_sq(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };

    const double pi = domain_pi();
    const double R2 = cert.R(t) * cert.R(t);
    const double c1 = sys.nonlinearity().c1, c2 = sys.nonlinearity().c2;
    const double f_window = plain_integral(t - 2.0, t);
    const double f_tail = plain_integral(t - delta, t);

    auto lam = [](std::size_t mm) { return static_cast<double>((mm + 1) * (mm + 1)); };
    FlatteningCertificate out;
    out.m = m;
    out.term_decay = std::exp(-lam(m)) * R2;
    out.term_growth = (4.0 * c2 * c2 * R2 + 4.0 * c1 * c1 * pi) / (kLambda1 * lam(m));
    out.term_forcing_window = 2.0 * std::exp(-lam(m) * delta) * f_window;
    out.term_forcing_tail = 2.0 * f_tail;

    const Metric metric = Metric::sine_modes();
    for (const auto& traj : ensemble) {
        const double tail = metric.tail_norm(traj.at_time(t), m);
        out.measured_tail_sq = std::max(out.measured_tail_sq, tail * tail);
    }
    out.holds = out.measured_tail_sq <= out.bound();

    // The proof's recipe: pick m so each m-dependent term drops below eps/4.
    std::size_t mm = 1;
    while (mm + 1 < 4096) {
        const bool ok = std::exp(-lam(mm)) * R2 <= eps / 4.0 &&
                        (4.0 * c2 * c2 * R2 + 4.0 * c1 * c1 * pi) / (kLambda1 * lam(mm)) <=
                            eps / 4.0 &&
                        2.0 * std::exp(-lam(mm) * delta) * f_window <= eps / 4.0;
        if (ok) break;
        ++mm;
    }
    out.m_recipe = mm;
    return out;
}

}  // namespace pullback::inclusion
