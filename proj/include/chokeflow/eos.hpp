#pragma once

#include <span>
#include <string>
#include <vector>

#include "chokeflow/fluid.hpp"

namespace chokeflow {

enum class PhaseLabel { Liquid, Vapor };

// How to choose among up to three real roots of the cubic.
enum class RootRule {
    Liquid,    // smallest root
    Vapor,     // largest root
    MinGibbs,  // root with the lowest mixture Gibbs energy
};

constexpr RootRule rule_for(PhaseLabel p) {
    return p == PhaseLabel::Liquid ? RootRule::Liquid : RootRule::Vapor;
}

// Mixture parameters of the Peng-Robinson EOS at (T, P, z).
struct MixtureParams {
    double temperature = 0.0;  // K
    double pressure = 0.0;     // Pa
    double a_mix = 0.0;        // Pa m6/mol2, includes alpha(T)
    double b_mix = 0.0;        // m3/mol
    double da_mix_dt = 0.0;    // Pa m6/(mol2 K)
    double A = 0.0;
    double B = 0.0;
    std::vector<double> a_i;      // a_c,i (no alpha)
    std::vector<double> alpha_i;
    std::vector<double> b_i;
    std::vector<double> a_cross;  // sum_j z_j a_ij, needed by the fugacity expression
};

// Largest number of real roots of a cubic, so roots fit a fixed buffer.
struct CubicRoots {
    double values[3]{};
    int count = 0;

    double min() const { return values[0]; }
    double max() const { return values[count - 1]; }
    std::span<const double> view() const { return {values, static_cast<std::size_t>(count)}; }
};

// Real roots Z > B of Z^3 - (1-B)Z^2 + (A-3B^2-2B)Z - (AB-B^2-B^3) = 0,
// ascending. Throws NoPhysicalRootError when none exists.
CubicRoots compressibility_roots(const MixtureParams& mp);
CubicRoots compressibility_roots(double A, double B);

// Liquid picks the smallest root, Vapor the largest.
double select_root(std::span<const double> roots, PhaseLabel phase);

// Residual Gibbs energy G_res/(RT) per mole at compressibility z.
double residual_gibbs(const MixtureParams& mp, double z);

enum class LiquidVolumeMode { ShiftedPR, Costald };

struct LiquidVolume {
    double molar_volume = 0.0;  // m3/mol
    LiquidVolumeMode mode = LiquidVolumeMode::ShiftedPR;
};

std::string to_string(LiquidVolumeMode mode);

// Peng-Robinson (1976/1978) with van der Waals one-fluid mixing. Holds the
// per-component constants of one FluidSystem. Immutable and thread-safe.
class PengRobinson {
public:
    explicit PengRobinson(FluidSystem fluid);

    const FluidSystem& fluid() const { return fluid_; }
    std::size_t size() const { return fluid_.size(); }

    // Enthalpy reference: H_ig = 0 at this temperature for every component.
    static constexpr double reference_temperature = 298.15;

    double kappa(std::size_t i) const { return kappa_[i]; }

    MixtureParams mixture_params(std::span<const double> z, double t, double p) const;
    MixtureParams mixture_params(const Composition& z, double t, double p) const {
        return mixture_params(z.fractions(), t, p);
    }

    double pick_root(const MixtureParams& mp, RootRule rule) const;

    // ln(phi_i) at a given root. Entries for absent components are still
    // computed (they are finite) but carry no physical meaning.
    std::vector<double> ln_phi_at(const MixtureParams& mp, double z) const;
    void ln_phi_at(const MixtureParams& mp, double z, std::span<double> out) const;

    std::vector<double> fugacity_coeffs(const Composition& z, double t, double p, PhaseLabel phase) const;
    std::vector<double> fugacity_coeffs(const Composition& z, double t, double p, RootRule rule) const;

    // Ideal-gas part: sum z_i integral of cp_i from the reference temperature.
    // Throws RangeError when T is outside any present component's cp range.
    double ideal_gas_enthalpy(std::span<const double> z, double t) const;
    double departure_enthalpy(const MixtureParams& mp, double z) const;
    double enthalpy_at(const MixtureParams& mp, std::span<const double> comp, double z) const;

    double molar_enthalpy(const Composition& z, double t, double p, PhaseLabel phase) const;
    double molar_enthalpy(const Composition& z, double t, double p, RootRule rule) const;

    // Temperature interval where every present component's cp correlation is valid.
    std::pair<double, double> cp_validity(std::span<const double> z) const;

    // Default: liquid root with Peneloux shift sum z_i vshift_i b_i.
    // Costald: Hankinson-Thomson saturated volume; needs costald data on
    // every present component and T below the mixture pseudo-critical.
    LiquidVolume liquid_molar_volume(const Composition& z, double t, double p,
                                     LiquidVolumeMode mode = LiquidVolumeMode::ShiftedPR) const;
    double costald_volume(const Composition& z, double t) const;

    // Vapor root volume ZRT/P.
    double vapor_molar_volume(const Composition& z, double t, double p) const;

private:
    FluidSystem fluid_;
    std::vector<double> a_c_;
    std::vector<double> b_;
    std::vector<double> kappa_;
    std::vector<double> one_minus_k_;  // row-major (1 - k_ij)
};

}  // namespace chokeflow
