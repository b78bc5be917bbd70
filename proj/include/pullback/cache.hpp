#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "pullback/inclusion.hpp"
#include "pullback/util.hpp"

namespace pullback::inclusion {

/// Content-addressed trajectory store: CSV rows (t, a_1 ... a_n) under a
/// directory keyed by the hash of the full solve description.
class TrajectoryCache {
  public:
    explicit TrajectoryCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    static std::string key(const StatePoint& u0, double t0, double T, const SolverConfig& cfg,
                           const Nonlinearity& nl, const Forcing& forcing,
                           const MemberDesign& member) {
        std::ostringstream desc;
        char buf[32];
        auto put = [&](double v) {
            std::snprintf(buf, sizeof(buf), "%.17g;", v);
            desc << buf;
        };
        desc << "v1;" << nl.name << ";" << forcing.name << ";";
        put(nl.c1);
        put(nl.c2);
        put(nl.d1);
        put(nl.d2);
        put(forcing.t_bar);
        put(forcing.sup_past);
        desc << cfg.modes << ";" << cfg.effective_quad() << ";";
        put(cfg.dt);
        desc << member.mollifier_index << ";";
        put(member.theta);
        put(t0);
        put(T);
        for (double c : u0.coords) put(c);
        const std::string s = desc.str();
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a(s.data(), s.size())));
        return buf;
    }

    std::optional<Trajectory> load(const std::string& key) const {
        std::ifstream in(path_for(key));
        if (!in) return std::nullopt;
        Trajectory traj;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string cell;
            std::vector<double> values;
            while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
            if (values.size() < 2) return std::nullopt;
            traj.times.push_back(values.front());
            traj.states.emplace_back(
                std::vector<double>(values.begin() + 1, values.end()));
            traj.h_norms.push_back(Metric::sine_modes().norm(traj.states.back()));
        }
        if (traj.times.empty()) return std::nullopt;
        return traj;
    }

    void store(const std::string& key, const Trajectory& traj) const {
        std::ofstream out(path_for(key));
        char buf[32];
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", traj.times[i]);
            out << buf;
            for (double c : traj.states[i].coords) {
                std::snprintf(buf, sizeof(buf), "%.17g", c);
                out << ',' << buf;
            }
            out << '\n';
        }
    }

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path path_for(const std::string& key) const {
        return dir_ / (key + ".csv");
    }
    std::filesystem::path dir_;
};

/// Cache-aware solve: hit returns the stored trajectory bit-exactly.
inline Trajectory solve_cached(const GalerkinSystem& sys, const StatePoint& u0, double t0,
                               double T, const MemberDesign& member, TrajectoryCache& cache) {
    const auto key = TrajectoryCache::key(u0, t0, T, sys.config(), sys.nonlinearity(),
                                          sys.forcing(), member);
    if (auto hit = cache.load(key)) return *hit;
    auto traj = sys.solve(u0, t0, T, member);
    cache.store(key, traj);
    return traj;
}

}  // namespace pullback::inclusion
