#include "chokeflow/eos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chokeflow/errors.hpp"
#include "chokeflow/units.hpp"

namespace chokeflow {

namespace {

constexpr double omega_a = 0.45723552892138218938;
constexpr double omega_b = 0.077796073903888455972;
constexpr double sqrt2 = std::numbers::sqrt2;
// Roots closer than this to the covolume are treated as spurious.
constexpr double covolume_margin = 1e-13;
// PR critical compressibility; a lone root below it is liquid-like.
constexpr double pr_critical_z = 0.3074013086987;

// ln[(Z + (1+sqrt2)B) / (Z + (1-sqrt2)B)], stable as B -> 0.
double log_ratio(double z, double b) {
    return std::log1p(2.0 * sqrt2 * b / (z + (1.0 - sqrt2) * b));
}

// A / (2 sqrt2 B) * log_ratio, with the B -> 0 limit A / Z.
double attraction_term(double a, double b, double z) {
    if (b == 0.0) return a / z;
    return a / (2.0 * sqrt2 * b) * log_ratio(z, b);
}

double polish(double z, double c2, double c1, double c0) {
    for (int k = 0; k < 3; ++k) {
        const double f = ((z + c2) * z + c1) * z + c0;
        const double df = (3.0 * z + 2.0 * c2) * z + c1;
        if (df == 0.0) break;
        const double step = f / df;
        z -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

}  // namespace

std::string to_string(LiquidVolumeMode mode) {
    return mode == LiquidVolumeMode::Costald ? "costald" : "shifted-pr";
}

CubicRoots compressibility_roots(double A, double B) {
    if (!(B >= 0.0) || !std::isfinite(A) || !std::isfinite(B)) {
        throw NoPhysicalRootError("PR cubic needs finite A and B >= 0 (A=" + std::to_string(A) +
                                  ", B=" + std::to_string(B) + ")");
    }
    const double c2 = -(1.0 - B);
    const double c1 = A - 3.0 * B * B - 2.0 * B;
    const double c0 = -(A * B - B * B - B * B * B);

    double raw[3];
    int n = 0;
    const double q = (3.0 * c1 - c2 * c2) / 9.0;
    const double r = (9.0 * c2 * c1 - 27.0 * c0 - 2.0 * c2 * c2 * c2) / 54.0;
    const double disc = q * q * q + r * r;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        raw[n++] = std::cbrt(r + sq) + std::cbrt(r - sq) - c2 / 3.0;
    } else {
        const double m = std::sqrt(-q);
        const double ratio = m > 0.0 ? std::clamp(r / (m * m * m), -1.0, 1.0) : 0.0;
        const double theta = std::acos(ratio);
        for (int k = 0; k < 3; ++k) {
            raw[n++] = 2.0 * m * std::cos((theta + 2.0 * std::numbers::pi * k) / 3.0) - c2 / 3.0;
        }
    }

    CubicRoots out;
    for (int k = 0; k < n; ++k) {
        const double z = polish(raw[k], c2, c1, c0);
        if (std::isfinite(z) && z - B > covolume_margin) out.values[out.count++] = z;
    }
    if (out.count == 0) {
        throw NoPhysicalRootError("PR cubic has no root with Z > B (A=" + std::to_string(A) +
                                  ", B=" + std::to_string(B) + ")");
    }
    std::sort(out.values, out.values + out.count);
    return out;
}

CubicRoots compressibility_roots(const MixtureParams& mp) {
    return compressibility_roots(mp.A, mp.B);
}

double select_root(std::span<const double> roots, PhaseLabel phase) {
    const auto [lo, hi] = std::minmax_element(roots.begin(), roots.end());
    return phase == PhaseLabel::Liquid ? *lo : *hi;
}

double residual_gibbs(const MixtureParams& mp, double z) {
    return z - 1.0 - std::log(z - mp.B) - attraction_term(mp.A, mp.B, z);
}

PengRobinson::PengRobinson(FluidSystem fluid) : fluid_(std::move(fluid)) {
    const std::size_t n = fluid_.size();
    const double r = units::gas_constant;
    a_c_.resize(n);
    b_.resize(n);
    kappa_.resize(n);
    one_minus_k_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = fluid_.component(i);
        a_c_[i] = omega_a * r * r * c.tc * c.tc / c.pc;
        b_[i] = omega_b * r * c.tc / c.pc;
        const double w = c.omega;
        // Heavy components use the 1978 polynomial.
        kappa_[i] = w <= 0.491 ? 0.37464 + 1.54226 * w - 0.26992 * w * w
                               : 0.379642 + 1.48503 * w - 0.164423 * w * w + 0.016666 * w * w * w;
        for (std::size_t j = 0; j < n; ++j) one_minus_k_[i * n + j] = 1.0 - fluid_.bip(i, j);
    }
}

MixtureParams PengRobinson::mixture_params(std::span<const double> z, double t, double p) const {
    const std::size_t n = size();
    const double r = units::gas_constant;
    MixtureParams mp;
    mp.temperature = t;
    mp.pressure = p;
    mp.a_i = a_c_;
    mp.b_i = b_;
    mp.alpha_i.resize(n);
    mp.a_cross.assign(n, 0.0);

    std::vector<double> sqrt_aa(n);   // sqrt(a_i alpha_i)
    std::vector<double> dln_a(n);     // d ln(a_i alpha_i) / dT
    for (std::size_t i = 0; i < n; ++i) {
        const double sqrt_tr = std::sqrt(t / fluid_.component(i).tc);
        const double m = 1.0 + kappa_[i] * (1.0 - sqrt_tr);
        mp.alpha_i[i] = m * m;
        sqrt_aa[i] = std::sqrt(a_c_[i]) * std::abs(m);
        // d alpha / dT = -kappa m / sqrt(T Tc)
        const double dalpha = -kappa_[i] * m / std::sqrt(t * fluid_.component(i).tc);
        dln_a[i] = dalpha / mp.alpha_i[i];
    }

    for (std::size_t i = 0; i < n; ++i) {
        mp.b_mix += z[i] * b_[i];
        if (z[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = one_minus_k_[i * n + j] * sqrt_aa[i] * sqrt_aa[j];
            mp.a_cross[i] += z[j] * aij;
            const double w = z[i] * z[j] * aij;
            mp.a_mix += w;
            mp.da_mix_dt += 0.5 * w * (dln_a[i] + dln_a[j]);
        }
    }
    // a_cross for absent components still needed for trace fugacities.
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] != 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            mp.a_cross[i] += z[j] * one_minus_k_[i * n + j] * sqrt_aa[i] * sqrt_aa[j];
        }
    }
    mp.A = mp.a_mix * p / (r * r * t * t);
    mp.B = mp.b_mix * p / (r * t);
    return mp;
}

double PengRobinson::pick_root(const MixtureParams& mp, RootRule rule) const {
    const auto roots = compressibility_roots(mp);
    switch (rule) {
        case RootRule::Liquid:
            return roots.min();
        case RootRule::Vapor:
            return roots.max();
        case RootRule::MinGibbs:
            break;
    }
    if (roots.count == 1) return roots.min();
    return residual_gibbs(mp, roots.min()) <= residual_gibbs(mp, roots.max()) ? roots.min() : roots.max();
}

void PengRobinson::ln_phi_at(const MixtureParams& mp, double z, std::span<double> out) const {
    const double ln_zb = std::log(z - mp.B);
    const double lr = mp.B > 0.0 ? log_ratio(z, mp.B) : 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double b_ratio = mp.b_i[i] / mp.b_mix;
        double attraction = 0.0;
        if (mp.a_mix > 0.0) {
            attraction = mp.A / (2.0 * sqrt2 * mp.B) * (2.0 * mp.a_cross[i] / mp.a_mix - b_ratio) * lr;
        }
        out[i] = b_ratio * (z - 1.0) - ln_zb - attraction;
    }
}

std::vector<double> PengRobinson::ln_phi_at(const MixtureParams& mp, double z) const {
    std::vector<double> out(size());
    ln_phi_at(mp, z, out);
    return out;
}

std::vector<double> PengRobinson::fugacity_coeffs(const Composition& z, double t, double p, RootRule rule) const {
    const auto mp = mixture_params(z, t, p);
    return ln_phi_at(mp, pick_root(mp, rule));
}

std::vector<double> PengRobinson::fugacity_coeffs(const Composition& z, double t, double p,
                                                  PhaseLabel phase) const {
    return fugacity_coeffs(z, t, p, rule_for(phase));
}

std::pair<double, double> PengRobinson::cp_validity(std::span<const double> z) const {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
        if (z[i] == 0.0) continue;
        lo = std::max(lo, fluid_.component(i).cp_ig.t_min);
        hi = std::min(hi, fluid_.component(i).cp_ig.t_max);
    }
    return {lo, hi};
}

double PengRobinson::ideal_gas_enthalpy(std::span<const double> z, double t) const {
    double h = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (z[i] == 0.0) continue;
        const auto& c = fluid_.component(i);
        if (!c.cp_ig.in_range(t)) {
            throw RangeError("temperature " + std::to_string(t) + " K outside cp_ig range of " + c.name + " [" +
                             std::to_string(c.cp_ig.t_min) + ", " + std::to_string(c.cp_ig.t_max) + "] K");
        }
        h += z[i] * c.cp_ig.enthalpy(t, reference_temperature);
    }
    return h;
}

double PengRobinson::departure_enthalpy(const MixtureParams& mp, double z) const {
    const double rt = units::gas_constant * mp.temperature;
    const double lr = mp.B > 0.0 ? log_ratio(z, mp.B) : 0.0;
    const double b = mp.b_mix;
    double term = 0.0;
    if (b > 0.0) term = (mp.temperature * mp.da_mix_dt - mp.a_mix) / (2.0 * sqrt2 * b) * lr;
    return rt * (z - 1.0) + term;
}

double PengRobinson::enthalpy_at(const MixtureParams& mp, std::span<const double> comp, double z) const {
    return ideal_gas_enthalpy(comp, mp.temperature) + departure_enthalpy(mp, z);
}

double PengRobinson::molar_enthalpy(const Composition& z, double t, double p, RootRule rule) const {
    const auto mp = mixture_params(z, t, p);
    return enthalpy_at(mp, z.fractions(), pick_root(mp, rule));
}

double PengRobinson::molar_enthalpy(const Composition& z, double t, double p, PhaseLabel phase) const {
    return molar_enthalpy(z, t, p, rule_for(phase));
}

LiquidVolume PengRobinson::liquid_molar_volume(const Composition& z, double t, double p,
                                               LiquidVolumeMode mode) const {
    if (mode == LiquidVolumeMode::Costald) {
        return {costald_volume(z, t), mode};
    }
    const auto mp = mixture_params(z, t, p);
    const auto roots = compressibility_roots(mp);
    if (roots.count == 1 && roots.min() >= pr_critical_z) {
        throw Error("no liquid root at T=" + std::to_string(t) + " K, P=" + std::to_string(p) + " Pa");
    }
    double shift = 0.0;
    for (std::size_t i = 0; i < size(); ++i) shift += z[i] * fluid_.component(i).vshift * b_[i];
    const double v = roots.min() * units::gas_constant * t / p - shift;
    return {v, mode};
}

double PengRobinson::costald_volume(const Composition& z, double t) const {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, w = 0.0;
    std::vector<double> vt(size(), 0.0);  // sqrt(V*_i Tc_i)
    for (std::size_t i = 0; i < size(); ++i) {
        if (z[i] == 0.0) continue;
        const auto& c = fluid_.component(i);
        if (!c.costald) {
            throw InputError("component '" + c.name + "' has no costald parameters");
        }
        const double vs = c.costald->v_star;
        s1 += z[i] * vs;
        s2 += z[i] * std::cbrt(vs * vs);
        s3 += z[i] * std::cbrt(vs);
        w += z[i] * c.costald->omega_srk;
        vt[i] = std::sqrt(vs * c.tc);
    }
    const double v_mix = 0.25 * (s1 + 3.0 * s2 * s3);
    double s4 = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = 0; j < size(); ++j) s4 += z[i] * z[j] * vt[i] * vt[j];
    }
    const double tc_mix = s4 / v_mix;
    const double tr = t / tc_mix;
    if (!(tr < 1.0)) {
        throw Error("COSTALD needs T below the mixture pseudo-critical temperature");
    }
    const double tau = 1.0 - tr;
    const double v0 = 1.0 - 1.52816 * std::cbrt(tau) + 1.43907 * std::cbrt(tau * tau) - 0.81446 * tau +
                      0.190454 * std::cbrt(tau * tau * tau * tau);
    const double vd = (-0.296123 + 0.386914 * tr - 0.0427258 * tr * tr - 0.0480645 * tr * tr * tr) /
                      (tr - 1.00001);
    return v_mix * v0 * (1.0 - w * vd);
}

double PengRobinson::vapor_molar_volume(const Composition& z, double t, double p) const {
    const auto mp = mixture_params(z, t, p);
    return compressibility_roots(mp).max() * units::gas_constant * t / p;
}

}  // namespace chokeflow
