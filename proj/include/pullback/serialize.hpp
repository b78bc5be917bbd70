#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pullback/state.hpp"

namespace pullback {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json to_json(const StatePoint& p) { return json(p.coords); }

/// SampledSet as an array of coordinate arrays.
inline json to_json(const SampledSet& s) {
    json arr = json::array();
    for (const auto& p : s.points) arr.push_back(p.coords);
    return arr;
}

/// NonautonomousSet keyed by time.
inline json to_json(const NonautonomousSet& family) {
    json obj = json::object();
    for (std::size_t i = 0; i < family.times.size(); ++i)
        obj[format_double(family.times[i])] = to_json(family.sets[i]);
    return obj;
}

/// One point per row, columns are coordinates.
inline std::string to_csv(const SampledSet& s) {
    std::string out;
    for (const auto& p : s.points) {
        for (std::size_t d = 0; d < p.dim(); ++d) {
            if (d) out += ',';
            out += format_double(p.coords[d]);
        }
        out += '\n';
    }
    return out;
}

inline std::string curve_csv(const std::vector<std::pair<double, double>>& curve,
                             const std::string& x_name, const std::string& y_name) {
    std::string out = x_name + "," + y_name + "\n";
    for (const auto& [x, y] : curve) out += format_double(x) + "," + format_double(y) + "\n";
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace pullback
