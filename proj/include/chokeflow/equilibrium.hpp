#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chokeflow/eos.hpp"
#include "chokeflow/fluid.hpp"

namespace chokeflow {

enum class PhaseState { SinglePhaseLiquid, SinglePhaseVapor, TwoPhase };

std::string to_string(PhaseState s);

struct PhaseEquilibrium {
    double beta = 0.0;  // vapor mole fraction
    Composition x;      // liquid
    Composition y;      // vapor
    double zl = 0.0;
    double zv = 0.0;
    PhaseState state = PhaseState::TwoPhase;
    int iterations = 0;
    double residual = 0.0;  // max |delta ln K| at the last iteration
    // Converged K-values on the two-phase branch; empty for single phase.
    std::vector<double> k_values;

    bool two_phase() const { return state == PhaseState::TwoPhase; }
};

// K_i = (Pc_i / P) exp[5.373 (1 + w_i)(1 - Tc_i / T)].
std::vector<double> wilson_k(const FluidSystem& fluid, double t, double p);

enum class RachfordRiceStatus {
    Solved,
    AllAboveOne,  // objective positive on the whole line: single vapor
    AllBelowOne,  // objective negative on the whole line: single liquid
    Degenerate,   // all K = 1 (trivial solution)
};

struct RachfordRiceSolution {
    RachfordRiceStatus status = RachfordRiceStatus::Solved;
    double beta = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// sum_i z_i (K_i - 1) / (1 + beta (K_i - 1))
double rachford_rice_objective(std::span<const double> z, std::span<const double> k, double beta);

// Solves on the negative-flash window (1/(1-Kmax), 1/(1-Kmin)) by Newton
// steps safeguarded with bisection. Components with z_i = 0 are ignored.
RachfordRiceSolution rachford_rice(std::span<const double> z, std::span<const double> k);

struct FlashOptions {
    int max_iterations = 1000;
    double k_tolerance = 1e-10;     // max |delta ln K|
    // Accepted when the residual stagnates (rounding floor near beta = 0 or 1).
    double floor_tolerance = 1e-9;
    double trivial_tolerance = 1e-6;  // ||K - 1||_inf
    int trivial_check_after = 5;
    // Optional starting K-values, e.g. from a neighbouring flash.
    std::span<const double> initial_k{};
};

PhaseEquilibrium pt_flash(const PengRobinson& eos, const Composition& z, double t, double p,
                          const FlashOptions& options = {});

// beta H_vapor + (1 - beta) H_liquid for a flash result.
double mixture_enthalpy(const PengRobinson& eos, const PhaseEquilibrium& eq, double t, double p);
// PT flash followed by mixture_enthalpy.
double mixture_enthalpy(const PengRobinson& eos, const Composition& z, double t, double p);

struct PhFlashOptions {
    // Contract: |H - H_target| < 0.01 J/mol. The solver iterates to a much
    // tighter internal tolerance so the outlet temperature is resolved well
    // below the estimator's temperature tolerances.
    double enthalpy_tolerance = 0.01;
    double internal_tolerance = 1e-5;
    double half_bracket = 60.0;  // K
    int max_iterations = 100;
    FlashOptions flash{};
};

struct PhFlashResult {
    double temperature = 0.0;  // K
    PhaseEquilibrium equilibrium;
    double enthalpy_error = 0.0;  // J/mol
    int iterations = 0;
};

PhFlashResult ph_flash(const PengRobinson& eos, const Composition& z, double p, double h_target, double t_guess,
                       const PhFlashOptions& options = {});

}  // namespace chokeflow
