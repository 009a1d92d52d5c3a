#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chokeflow {

// Ideal-gas heat capacity cp(T) = c0 + c1 T + c2 T^2 + c3 T^3 in J/(mol K).
struct IdealGasCp {
    std::array<double, 4> coeffs{};
    double t_min = 0.0;  // K
    double t_max = 0.0;  // K

    double cp(double t) const;
    // Integral of cp from t_ref to t.
    double enthalpy(double t, double t_ref) const;
    bool in_range(double t) const { return t >= t_min && t <= t_max; }
};

struct CostaldParams {
    double v_star = 0.0;     // m3/mol
    double omega_srk = 0.0;
};

struct ComponentProps {
    std::string name;
    double tc = 0.0;     // K
    double pc = 0.0;     // Pa
    double omega = 0.0;
    double mw = 0.0;     // g/mol
    double zc = 0.0;
    double parachor = 0.0;  // carried through from the dataset, unused
    IdealGasCp cp_ig;
    double vshift = 0.0;  // dimensionless, c_i = vshift * b_i
    std::optional<CostaldParams> costald;
};

enum class UnitSystem { Field, SI };

class FluidSystem {
public:
    FluidSystem(std::vector<ComponentProps> components, std::vector<std::vector<double>> bip);

    std::size_t size() const { return components_.size(); }
    const ComponentProps& component(std::size_t i) const { return components_[i]; }
    const std::vector<ComponentProps>& components() const { return components_; }
    double bip(std::size_t i, std::size_t j) const { return bip_[i * size() + j]; }
    std::optional<std::size_t> index_of(const std::string& name) const;
    std::vector<std::string> names() const;

    // Free-text provenance, round-tripped through the dataset file.
    std::string name;
    std::string cp_source;
    std::string costald_source;
    std::vector<std::string> notes;
    UnitSystem declared_units = UnitSystem::SI;

private:
    std::vector<ComponentProps> components_;
    std::vector<double> bip_;  // row-major N x N
};

// Mole fractions over a FluidSystem's components. Always nonnegative and
// summing to one; only obtainable through normalize().
class Composition {
public:
    Composition() = default;

    std::size_t size() const { return z_.size(); }
    double operator[](std::size_t i) const { return z_[i]; }
    std::span<const double> fractions() const { return z_; }
    const std::vector<double>& values() const { return z_; }
    auto begin() const { return z_.begin(); }
    auto end() const { return z_.end(); }

    friend bool operator==(const Composition&, const Composition&) = default;

private:
    explicit Composition(std::vector<double> z) : z_(std::move(z)) {}
    friend Composition normalize(std::span<const double> raw);

    std::vector<double> z_;
};

// Fractions below this are clamped to zero before the final renormalization.
inline constexpr double trace_fraction = 1e-15;

Composition normalize(std::span<const double> raw);
inline Composition normalize(std::initializer_list<double> raw) {
    return normalize(std::span<const double>(raw.begin(), raw.size()));
}

FluidSystem load_fluid_system(const std::filesystem::path& path);
FluidSystem parse_fluid_system(const std::string& json_text);
// Serializes in the system's declared units; values converted back from SI
// are rounded to 15 significant digits so file values survive a round trip.
std::string serialize_fluid_system(const FluidSystem& fluid);

}  // namespace chokeflow
