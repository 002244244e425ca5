// JSON / CSV serialization for states, trajectories and reports.
// Doubles are printed with max_digits10 so identical runs emit identical
// bytes.

#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "kdv/estimates.hpp"
#include "kdv/fourier_state.hpp"
#include "kdv/galerkin.hpp"
#include "kdv/inverse_operator.hpp"

namespace kdv {

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// State <-> JSON array of records {k, re, im}.
inline nlohmann::json state_to_json(const FourierState& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, a] : v.entries())
        arr.push_back({{"k", k}, {"re", a.real()}, {"im", a.imag()}});
    return arr;
}

inline FourierState state_from_json(const nlohmann::json& arr) {
    FourierState::Map m;
    for (const auto& rec : arr)
        m[rec.at("k").get<int>()] = Complex{rec.at("re").get<double>(),
                                            rec.at("im").get<double>()};
    FourierState v(std::move(m), false);
    v.mark_real_valued(v.is_hermitian(1e-12));
    return v;
}

// State CSV with columns k,re,im.
inline void state_to_csv(const FourierState& v, std::ostream& os) {
    os << "k,re,im\n";
    for (const auto& [k, a] : v.entries())
        os << k << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << '\n';
}

inline FourierState state_from_csv(std::istream& is) {
    FourierState::Map m;
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int k = 0;
        double re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &k, &re, &im) != 3)
            throw std::runtime_error("state_from_csv: malformed row: " + line);
        m[k] = Complex{re, im};
    }
    FourierState v(std::move(m), false);
    v.mark_real_valued(v.is_hermitian(1e-12));
    return v;
}

// Trajectory CSV with columns t,k,re,im.
inline void trajectory_to_csv(const Trajectory& traj, std::ostream& os) {
    os << "t,k,re,im\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const std::string ts = format_double(traj.times[i]);
        for (const auto& [k, a] : traj.states[i].entries())
            os << ts << ',' << k << ',' << format_double(a.real()) << ','
               << format_double(a.imag()) << '\n';
    }
}

inline nlohmann::json report_to_json(const BoundReport& rep) {
    nlohmann::json j;
    j["trials"] = rep.trials;
    j["max_ratio"] = rep.max_ratio;
    if (rep.constant)
        j["constant"] = *rep.constant;
    else
        j["constant"] = "empirical";
    j["pass"] = rep.pass;
    j["worst_seed"] = rep.worst_seed;
    j["formula"] = rep.spec.formula_id;
    return j;
}

inline nlohmann::json inversion_to_json(const InversionReport& rep) {
    nlohmann::json j;
    j["method"] = rep.method;
    j["residual"] = rep.residual;
    j["c_tilde_re"] = rep.c_tilde.real();
    j["c_tilde_im"] = rep.c_tilde.imag();
    j["C_re"] = rep.C_const.real();
    j["C_im"] = rep.C_const.imag();
    j["periodicity_defect"] = rep.periodicity_defect;
    j["mean_defect"] = rep.mean_defect;
    j["c_tilde_defect"] = rep.c_tilde_defect;
    if (rep.condition_estimate > 0.0) j["condition_estimate"] = rep.condition_estimate;
    j["solution"] = state_to_json(rep.v);
    return j;
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << contents;
}

}  // namespace kdv
