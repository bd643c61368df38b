#include "vfpns/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vfpns {

void ModelParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be positive");
    if (!(gamma > 1.0)) throw std::invalid_argument("ModelParams: gamma must be > 1");
    if (!(c0 > 0.0)) throw std::invalid_argument("ModelParams: c0 must be positive");
}

void EnergyWeights::validate() const {
    const double taus[] = {tau1, tau2, tau3, tau4, tau5, tau6, tau7};
    for (double t : taus)
        if (!(t > 0.0 && t < 1.0))
            throw std::invalid_argument("EnergyWeights: every tau must lie in (0,1)");
    if (!(tau3 <= tau1 / 10.0))
        throw std::invalid_argument("EnergyWeights: tau3 must be <= tau1/10");
    if (!(c_mixed_1 > 0.0 && c_mixed_2 > 0.0))
        throw std::invalid_argument("EnergyWeights: C_k must be positive");
}

SystemState::SystemState(std::shared_ptr<const Grid> g, std::shared_ptr<const Truncation> t)
    : grid(std::move(g)), trunc(std::move(t)), rho(grid) {
    if (grid->dim() != trunc->dim())
        throw std::invalid_argument("SystemState: grid and truncation dimensions differ");
    fcoeffs.reserve(trunc->size());
    for (int p = 0; p < trunc->size(); ++p) fcoeffs.emplace_back(grid);
    for (int axis = 0; axis < grid->dim(); ++axis) vel.emplace_back(grid);
}

void SystemState::gather_mode(int lin, std::span<Complex> out) const {
    const int na = trunc->size();
    for (int p = 0; p < na; ++p) out[p] = fcoeffs[p].coeffs[lin];
    out[na] = rho.coeffs[lin];
    for (int axis = 0; axis < grid->dim(); ++axis) out[na + 1 + axis] = vel[axis].coeffs[lin];
}

void SystemState::scatter_mode(int lin, std::span<const Complex> in) {
    const int na = trunc->size();
    for (int p = 0; p < na; ++p) fcoeffs[p].coeffs[lin] = in[p];
    rho.coeffs[lin] = in[na];
    for (int axis = 0; axis < grid->dim(); ++axis) vel[axis].coeffs[lin] = in[na + 1 + axis];
}

void SystemState::set_zero() {
    for (auto& f : fcoeffs) std::fill(f.coeffs.begin(), f.coeffs.end(), Complex(0.0));
    std::fill(rho.coeffs.begin(), rho.coeffs.end(), Complex(0.0));
    for (auto& u : vel) std::fill(u.coeffs.begin(), u.coeffs.end(), Complex(0.0));
}

void SystemState::axpy(double a, const SystemState& other) {
    for (size_t p = 0; p < fcoeffs.size(); ++p)
        for (size_t i = 0; i < fcoeffs[p].coeffs.size(); ++i)
            fcoeffs[p].coeffs[i] += a * other.fcoeffs[p].coeffs[i];
    for (size_t i = 0; i < rho.coeffs.size(); ++i) rho.coeffs[i] += a * other.rho.coeffs[i];
    for (size_t axis = 0; axis < vel.size(); ++axis)
        for (size_t i = 0; i < vel[axis].coeffs.size(); ++i)
            vel[axis].coeffs[i] += a * other.vel[axis].coeffs[i];
}

void SystemState::scale(double a) {
    for (auto& f : fcoeffs)
        for (auto& c : f.coeffs) c *= a;
    for (auto& c : rho.coeffs) c *= a;
    for (auto& u : vel)
        for (auto& c : u.coeffs) c *= a;
}

double SystemState::max_abs() const {
    double m = 0.0;
    for (const auto& f : fcoeffs)
        for (const auto& c : f.coeffs) m = std::max(m, std::abs(c));
    for (const auto& c : rho.coeffs) m = std::max(m, std::abs(c));
    for (const auto& u : vel)
        for (const auto& c : u.coeffs) m = std::max(m, std::abs(c));
    return m;
}

bool SystemState::all_finite() const {
    auto ok = [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    for (const auto& f : fcoeffs)
        for (const auto& c : f.coeffs)
            if (!ok(c)) return false;
    for (const auto& c : rho.coeffs)
        if (!ok(c)) return false;
    for (const auto& u : vel)
        for (const auto& c : u.coeffs)
            if (!ok(c)) return false;
    return true;
}

std::string DiagnosticsRecord::csv_header() {
    return "time,zq2,h2_f,h2_rho,h2_u,E,D,E1,D1,mass_p,mass_f,mom_x,mom_y,mom_z,pos_min,"
           "grad_f,grad_rho,grad_u";
}

namespace {
void append_g17(std::string& s, double v, bool first = false) {
    char buf[40];
    std::snprintf(buf, sizeof buf, first ? "%.17g" : ",%.17g", v);
    s += buf;
}
}  // namespace

std::string DiagnosticsRecord::csv_row() const {
    std::string s;
    append_g17(s, time, true);
    for (double v : {zq2, h2_f, h2_rho, h2_u, energy_E, dissipation_D, energy_E1, dissipation_D1,
                     mass_particle, mass_fluid, momentum_x, momentum_y, momentum_z, positivity_min,
                     grad_f, grad_rho, grad_u})
        append_g17(s, v);
    return s;
}

std::string DiagnosticsRecord::json_object() const {
    const char* names[] = {"time",  "zq2",   "h2_f",  "h2_rho", "h2_u",    "E",
                           "D",     "E1",    "D1",    "mass_p", "mass_f",  "mom_x",
                           "mom_y", "mom_z", "pos_min", "grad_f", "grad_rho", "grad_u"};
    const double vals[] = {time,          zq2,           h2_f,       h2_rho,     h2_u,
                           energy_E,      dissipation_D, energy_E1,  dissipation_D1,
                           mass_particle, mass_fluid,    momentum_x, momentum_y, momentum_z,
                           positivity_min, grad_f,       grad_rho,   grad_u};
    std::string s = "{";
    for (int i = 0; i < 18; ++i) {
        if (i) s += ",";
        s += "\"";
        s += names[i];
        s += "\":";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
        s += buf;
    }
    s += "}";
    return s;
}

}  // namespace vfpns
