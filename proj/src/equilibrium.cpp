#include "chokeflow/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chokeflow/errors.hpp"
#include "chokeflow/numerics.hpp"

namespace chokeflow {

std::string to_string(PhaseState s) {
    switch (s) {
        case PhaseState::SinglePhaseLiquid:
            return "SINGLE_PHASE_LIQUID";
        case PhaseState::SinglePhaseVapor:
            return "SINGLE_PHASE_VAPOR";
        case PhaseState::TwoPhase:
            return "TWO_PHASE";
    }
    return "UNKNOWN";
}

std::vector<double> wilson_k(const FluidSystem& fluid, double t, double p) {
    std::vector<double> k(fluid.size());
    for (std::size_t i = 0; i < fluid.size(); ++i) {
        const auto& c = fluid.component(i);
        k[i] = c.pc / p * std::exp(5.373 * (1.0 + c.omega) * (1.0 - c.tc / t));
    }
    return k;
}

double rachford_rice_objective(std::span<const double> z, std::span<const double> k, double beta) {
    double g = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == 0.0) continue;
        g += z[i] * (k[i] - 1.0) / (1.0 + beta * (k[i] - 1.0));
    }
    return g;
}

RachfordRiceSolution rachford_rice(std::span<const double> z, std::span<const double> k) {
    double k_min = std::numeric_limits<double>::infinity();
    double k_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == 0.0) continue;
        k_min = std::min(k_min, k[i]);
        k_max = std::max(k_max, k[i]);
    }
    RachfordRiceSolution sol;
    if (k_min == 1.0 && k_max == 1.0) {
        sol.status = RachfordRiceStatus::Degenerate;
        return sol;
    }
    if (k_min >= 1.0) {
        sol.status = RachfordRiceStatus::AllAboveOne;
        sol.beta = 1.0;
        return sol;
    }
    if (k_max <= 1.0) {
        sol.status = RachfordRiceStatus::AllBelowOne;
        sol.beta = 0.0;
        return sol;
    }

    // The objective decreases monotonically from +inf to -inf on the window.
    double lo = 1.0 / (1.0 - k_max);
    double hi = 1.0 / (1.0 - k_min);
    double beta = std::clamp(0.5, lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo));
    double g = 0.0;
    for (int iter = 1; iter <= 300; ++iter) {
        g = 0.0;
        double dg = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (z[i] == 0.0) continue;
            const double km1 = k[i] - 1.0;
            const double den = 1.0 + beta * km1;
            g += z[i] * km1 / den;
            dg -= z[i] * km1 * km1 / (den * den);
        }
        sol.iterations = iter;
        if (g == 0.0) break;
        if (g > 0.0) {
            lo = beta;
        } else {
            hi = beta;
        }
        double next = beta - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - beta);
        beta = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(beta))) break;
    }
    sol.beta = beta;
    sol.residual = rachford_rice_objective(z, k, beta);
    return sol;
}

namespace {

PhaseEquilibrium single_phase(const PengRobinson& eos, const Composition& z, double t, double p, PhaseState state,
                              int iterations, double residual) {
    PhaseEquilibrium eq;
    eq.state = state;
    eq.beta = state == PhaseState::SinglePhaseVapor ? 1.0 : 0.0;
    eq.x = z;
    eq.y = z;
    const auto mp = eos.mixture_params(z, t, p);
    const double root = eos.pick_root(mp, RootRule::MinGibbs);
    eq.zl = root;
    eq.zv = root;
    eq.iterations = iterations;
    eq.residual = residual;
    return eq;
}

// Phase label for a single-phase feed when K-values carry no information:
// the Gibbs-stable root when the cubic has three, else the pseudo-critical
// temperature.
PhaseState label_by_gibbs(const PengRobinson& eos, const Composition& z, double t, double p) {
    const auto mp = eos.mixture_params(z, t, p);
    const auto roots = compressibility_roots(mp);
    if (roots.count > 1) {
        return residual_gibbs(mp, roots.min()) <= residual_gibbs(mp, roots.max()) ? PhaseState::SinglePhaseLiquid
                                                                                  : PhaseState::SinglePhaseVapor;
    }
    double t_pc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) t_pc += z[i] * eos.fluid().component(i).tc;
    return t >= t_pc ? PhaseState::SinglePhaseVapor : PhaseState::SinglePhaseLiquid;
}

struct Split {
    std::vector<double> x;
    std::vector<double> y;
};

// Phase compositions from K and beta, rebuilt so that z = beta y + (1-beta) x
// holds to rounding.
Split split_compositions(std::span<const double> z, std::span<const double> k, double beta) {
    const std::size_t n = z.size();
    Split s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] == 0.0) continue;
        s.x[i] = z[i] / (1.0 + beta * (k[i] - 1.0));
        s.y[i] = k[i] * s.x[i];
        sx += s.x[i];
        sy += s.y[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.x[i] /= sx;
        s.y[i] /= sy;
    }
    // Per component, rebuild the phase that carries most of z_i from the
    // other one: the subtraction then never cancels more than half of z_i,
    // and trace amounts keep y_i = K_i x_i to full relative precision.
    if (beta > 0.0 && beta < 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (beta * s.y[i] >= (1.0 - beta) * s.x[i]) {
                s.y[i] = std::max(0.0, (z[i] - (1.0 - beta) * s.x[i]) / beta);
            } else {
                s.x[i] = std::max(0.0, (z[i] - beta * s.y[i]) / (1.0 - beta));
            }
        }
    }
    return s;
}

}  // namespace

PhaseEquilibrium pt_flash(const PengRobinson& eos, const Composition& z, double t, double p,
                          const FlashOptions& options) {
    const std::size_t n = z.size();
    if (n != eos.size()) {
        throw InputError("composition size does not match the fluid system");
    }
    if (!(t > 0.0) || !(p > 0.0)) {
        throw InputError("flash requires T > 0 and P > 0");
    }
    const auto zf = z.fractions();
    const auto active = std::count_if(zf.begin(), zf.end(), [](double v) { return v > 0.0; });
    if (active == 1) {
        return single_phase(eos, z, t, p, label_by_gibbs(eos, z, t, p), 0, 0.0);
    }

    std::vector<double> k;
    if (options.initial_k.size() == n) {
        k.assign(options.initial_k.begin(), options.initial_k.end());
    } else {
        k = wilson_k(eos.fluid(), t, p);
    }
    std::vector<double> ln_k(n), ln_phi_l(n), ln_phi_v(n);
    for (std::size_t i = 0; i < n; ++i) ln_k[i] = std::log(k[i]);

    bool restarted = false;
    double residual = std::numeric_limits<double>::infinity();
    RachfordRiceSolution rr;
    auto restart_or_settle = [&](int iter) -> std::optional<PhaseEquilibrium> {
        if (!restarted) {
            restarted = true;
            k = wilson_k(eos.fluid(), t, p);
            for (std::size_t i = 0; i < n; ++i) {
                k[i] = std::pow(k[i], 1.5);
                ln_k[i] = std::log(k[i]);
            }
            return std::nullopt;
        }
        return single_phase(eos, z, t, p, label_by_gibbs(eos, z, t, p), iter, residual);
    };

    int iter = 0;
    bool converged = false;
    double best_residual = std::numeric_limits<double>::infinity();
    int stalled = 0;
    while (iter < options.max_iterations) {
        ++iter;
        rr = rachford_rice(zf, k);
        if (rr.status == RachfordRiceStatus::AllAboveOne) {
            return single_phase(eos, z, t, p, PhaseState::SinglePhaseVapor, iter, residual);
        }
        if (rr.status == RachfordRiceStatus::AllBelowOne) {
            return single_phase(eos, z, t, p, PhaseState::SinglePhaseLiquid, iter, residual);
        }
        if (rr.status == RachfordRiceStatus::Degenerate) {
            if (auto eq = restart_or_settle(iter)) return *eq;
            continue;
        }

        const auto s = split_compositions(zf, k, rr.beta);
        const auto mp_l = eos.mixture_params(s.x, t, p);
        const auto mp_v = eos.mixture_params(s.y, t, p);
        eos.ln_phi_at(mp_l, compressibility_roots(mp_l).min(), ln_phi_l);
        eos.ln_phi_at(mp_v, compressibility_roots(mp_v).max(), ln_phi_v);

        residual = 0.0;
        double dist_from_one = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (zf[i] == 0.0) continue;
            const double next = ln_phi_l[i] - ln_phi_v[i];
            residual = std::max(residual, std::abs(next - ln_k[i]));
            ln_k[i] = next;
            k[i] = std::exp(next);
            dist_from_one = std::max(dist_from_one, std::abs(k[i] - 1.0));
        }
        if (!std::isfinite(residual)) {
            throw ConvergenceError("PT flash produced non-finite K-values", residual);
        }
        if (residual < options.k_tolerance) {
            converged = true;
            break;
        }
        // Accept a numerical floor: the residual is already below the
        // fugacity tolerance and has stopped improving.
        if (residual < best_residual * 0.5) {
            best_residual = residual;
            stalled = 0;
        } else if (++stalled >= 10 && residual < options.floor_tolerance) {
            converged = true;
            break;
        }
        if (iter >= options.trivial_check_after && dist_from_one < options.trivial_tolerance) {
            if (auto eq = restart_or_settle(iter)) return *eq;
        }
    }
    if (!converged) {
        throw ConvergenceError("PT flash did not converge in " + std::to_string(options.max_iterations) +
                                   " iterations at T=" + std::to_string(t) + " K, P=" + std::to_string(p) + " Pa",
                               residual);
    }

    rr = rachford_rice(zf, k);
    if (rr.status != RachfordRiceStatus::Solved || !(rr.beta > 0.0 && rr.beta < 1.0)) {
        const bool vapor = rr.status == RachfordRiceStatus::AllAboveOne ||
                           (rr.status == RachfordRiceStatus::Solved && rr.beta >= 1.0);
        if (rr.status == RachfordRiceStatus::Degenerate) {
            return single_phase(eos, z, t, p, label_by_gibbs(eos, z, t, p), iter, residual);
        }
        return single_phase(eos, z, t, p, vapor ? PhaseState::SinglePhaseVapor : PhaseState::SinglePhaseLiquid,
                            iter, residual);
    }

    const auto s = split_compositions(zf, k, rr.beta);
    PhaseEquilibrium eq;
    eq.state = PhaseState::TwoPhase;
    eq.beta = rr.beta;
    eq.x = normalize(s.x);
    eq.y = normalize(s.y);
    eq.zl = compressibility_roots(eos.mixture_params(eq.x, t, p)).min();
    eq.zv = compressibility_roots(eos.mixture_params(eq.y, t, p)).max();
    eq.iterations = iter;
    eq.residual = residual;
    eq.k_values = k;
    return eq;
}

double mixture_enthalpy(const PengRobinson& eos, const PhaseEquilibrium& eq, double t, double p) {
    if (!eq.two_phase()) {
        const auto mp = eos.mixture_params(eq.x, t, p);
        return eos.enthalpy_at(mp, eq.x.fractions(), eq.zl);
    }
    const auto mp_l = eos.mixture_params(eq.x, t, p);
    const auto mp_v = eos.mixture_params(eq.y, t, p);
    const double h_l = eos.enthalpy_at(mp_l, eq.x.fractions(), eq.zl);
    const double h_v = eos.enthalpy_at(mp_v, eq.y.fractions(), eq.zv);
    return eq.beta * h_v + (1.0 - eq.beta) * h_l;
}

double mixture_enthalpy(const PengRobinson& eos, const Composition& z, double t, double p) {
    return mixture_enthalpy(eos, pt_flash(eos, z, t, p), t, p);
}

PhFlashResult ph_flash(const PengRobinson& eos, const Composition& z, double p, double h_target, double t_guess,
                       const PhFlashOptions& options) {
    const auto [t_min, t_max] = eos.cp_validity(z.fractions());
    std::vector<double> warm_k;
    PhaseEquilibrium best_eq;
    double best_t = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    int evaluations = 0;

    auto residual = [&](double t) {
        FlashOptions fo = options.flash;
        if (!warm_k.empty()) fo.initial_k = warm_k;
        auto eq = pt_flash(eos, z, t, p, fo);
        ++evaluations;
        const double err = mixture_enthalpy(eos, eq, t, p) - h_target;
        if (eq.two_phase()) warm_k = eq.k_values;
        if (std::abs(err) < best_err) {
            best_err = std::abs(err);
            best_t = t;
            best_eq = std::move(eq);
        }
        return err;
    };

    double lo = std::max(t_guess - options.half_bracket, t_min);
    double hi = std::min(t_guess + options.half_bracket, t_max);
    if (!(lo < hi)) {
        throw UnreachableEnthalpyError("temperature search bracket lies outside the cp validity range");
    }
    double f_lo = residual(lo);
    double f_hi = residual(hi);
    if ((f_lo > 0.0) == (f_hi > 0.0) && f_lo != 0.0 && f_hi != 0.0) {
        lo = std::max(lo - options.half_bracket, t_min);
        hi = std::min(hi + options.half_bracket, t_max);
        f_lo = residual(lo);
        f_hi = residual(hi);
        if ((f_lo > 0.0) == (f_hi > 0.0) && f_lo != 0.0 && f_hi != 0.0) {
            throw UnreachableEnthalpyError("target enthalpy " + std::to_string(h_target) +
                                           " J/mol not reachable between " + std::to_string(lo) + " and " +
                                           std::to_string(hi) + " K");
        }
    }
    const auto root = brent_root(residual, lo, hi, f_lo, f_hi, options.internal_tolerance, 1e-12,
                                 options.max_iterations);
    if (!(std::abs(root.fx) < options.enthalpy_tolerance)) {
        throw ConvergenceError("PH flash did not reach the enthalpy tolerance", root.fx);
    }
    PhFlashResult out;
    out.temperature = root.x;
    out.equilibrium = best_t == root.x ? std::move(best_eq) : pt_flash(eos, z, root.x, p, options.flash);
    out.enthalpy_error = root.fx;
    out.iterations = evaluations;
    return out;
}

}  // namespace chokeflow
