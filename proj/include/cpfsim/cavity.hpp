#pragma once

// Photon reflection off the one-sided atom-cavity system: complex
// reflection coefficient from the single-mode input-output relation,
// conditional phase between coupled and empty configurations, phase
// bandwidth, spectral phase statistics, and the photon-loss budget.
//
// All rates (g, kappa, gamma, detuning) are in units of 2*pi*MHz, i.e.
// plain MHz numbers on the frequency axis.

#include "cpfsim/quadrature.hpp"
#include "cpfsim/qcore.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

namespace cpfsim {

struct CavityParams {
    double g = 7.0;        // atom-cavity coupling
    double kappa = 2.5;    // total cavity field decay
    double kappa_r = 2.5;  // outcoupling-mirror decay, <= kappa
    double gamma = 3.0;    // atomic polarization decay
    double delta_pol_khz = 420.0;  // polarization-eigenmode splitting;
                                   // enters the gate only via the
                                   // birefringence angle xi

    double cooperativity() const { return g * g / (2.0 * kappa * gamma); }
};

inline void validate(const CavityParams& p) {
    if (p.g <= 0 || p.kappa <= 0 || p.kappa_r <= 0 || p.gamma <= 0)
        throw std::invalid_argument("CavityParams: rates must be positive");
    if (p.kappa_r > p.kappa + 1e-12)
        throw std::invalid_argument("CavityParams: kappa_r must not exceed kappa");
}

struct ReflectionResult {
    cd r;                // complex reflection amplitude
    double phase;        // arg r, in (-pi, pi]
    double reflectivity; // |r|^2
};

struct EfficiencyChain {
    double t_fiber = 0.404;  // delay-fibre transmission
    double r_cavity = 0.67;  // cavity reflectivity
    double t_optics = 0.81;  // all remaining optics combined
};

struct EfficiencyBudget {
    double per_photon;
    double pair;
};

struct PhaseStatistics {
    double mean;    // radians
    double stddev;  // radians
};

struct PhaseBand {
    bool empty = false;
    double width_mhz = 0.0;  // full width of the accepted detuning band
};

// ---------------------------------------------------------------------------

/// Wrap an angle to (-pi, pi].
inline double wrap_phase(double x) {
    x = std::fmod(x, 2.0 * pi);
    if (x <= -pi) x += 2.0 * pi;
    if (x > pi) x -= 2.0 * pi;
    return x;
}

/// Single-mode input-output reflection of a resonant one-sided cavity,
///   r(delta) = 1 - 2*kappa_r*(gamma + i*delta) /
///              ((kappa + i*delta)*(gamma + i*delta) + g^2*[coupled]).
/// `coupled` selects whether the atomic transition participates (atom in
/// the coupled state and photon in the coupled polarization).
inline ReflectionResult reflection_coefficient(const CavityParams& p, double delta, bool coupled) {
    validate(p);
    const cd denom = (cd(p.kappa, delta)) * (cd(p.gamma, delta)) + (coupled ? p.g * p.g : 0.0);
    const cd r = 1.0 - 2.0 * p.kappa_r * cd(p.gamma, delta) / denom;
    return {r, std::arg(r), std::norm(r)};
}

/// Conditional phase arg r_coupled - arg r_empty, wrapped to (-pi, pi].
/// On resonance this is the pi of the controlled-Z interaction.
inline double conditional_phase(const CavityParams& p, double delta) {
    const auto rc = reflection_coefficient(p, delta, true);
    const auto re = reflection_coefficient(p, delta, false);
    return wrap_phase(rc.phase - re.phase);
}

/// Signed deviation of the conditional phase from pi, continuous around
/// resonance (0 at delta = 0 for the paper's parameter regime).
inline double phase_deviation_from_pi(const CavityParams& p, double delta) {
    return wrap_phase(conditional_phase(p, delta) - pi);
}

/// Full width (MHz) of the detuning band where the conditional phase stays
/// within `tol` of pi. Bisection to 1 kHz resolution.
inline PhaseBand phase_accuracy_bandwidth(const CavityParams& p, double tol) {
    if (tol <= 0.0 || tol >= pi) throw std::invalid_argument("phase_accuracy_bandwidth: tol outside (0, pi)");
    if (std::abs(phase_deviation_from_pi(p, 0.0)) > tol) return {true, 0.0};

    // bracket the band edge; far-detuned photons ignore the atom, so the
    // deviation eventually reaches -pi
    double lo = 0.0, hi = 1.0;
    while (std::abs(phase_deviation_from_pi(p, hi)) <= tol) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) return {false, 2.0 * hi};  // band wider than any sensible scan
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(phase_deviation_from_pi(p, mid)) <= tol ? lo : hi) = mid;
    }
    return {false, 2.0 * 0.5 * (lo + hi)};
}

/// Mean and standard deviation of the conditional phase over a Gaussian
/// spectral density of the given FWHM centered on resonance.
inline PhaseStatistics pulse_phase_statistics(const CavityParams& p, double spectrum_fwhm_mhz,
                                              int nodes = 64) {
    if (spectrum_fwhm_mhz <= 0.0)
        throw std::invalid_argument("pulse_phase_statistics: FWHM must be positive");
    if (nodes < 32) nodes = 32;
    const double sigma = spectrum_fwhm_mhz / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const auto rule = gauss_hermite_normal(nodes, 0.0, sigma);

    double mean = 0.0;
    for (int k = 0; k < nodes; ++k)
        mean += rule.weights[k] * (pi + phase_deviation_from_pi(p, rule.nodes[k]));
    double var = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double phi = pi + phase_deviation_from_pi(p, rule.nodes[k]);
        var += rule.weights[k] * (phi - mean) * (phi - mean);
    }
    return {mean, std::sqrt(std::max(0.0, var))};
}

/// Outcoupling rate that reproduces a given empty-cavity resonant
/// reflectivity, on the overcoupled branch (r < 0, so the empty cavity
/// keeps its pi reflection phase). Solved by bisection.
inline double solve_kappa_r(double kappa, double target_reflectivity) {
    if (target_reflectivity <= 0.0 || target_reflectivity >= 1.0)
        throw std::invalid_argument("solve_kappa_r: reflectivity must be in (0,1)");
    // r_empty(0) = 1 - 2*kappa_r/kappa, monotone decreasing in kappa_r;
    // overcoupled branch: kappa_r in (kappa/2, kappa]
    double lo = 0.5 * kappa, hi = kappa;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = 1.0 - 2.0 * mid / kappa;
        (r * r > target_reflectivity ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// CavityParams with the measured rates and kappa_r fitted to the quoted
/// cavity reflectivity.
inline CavityParams paper_cavity(double reflectivity = 0.67) {
    CavityParams p;
    p.kappa_r = solve_kappa_r(p.kappa, reflectivity);
    return p;
}

inline EfficiencyBudget efficiency_budget(const EfficiencyChain& c) {
    for (double v : {c.t_fiber, c.r_cavity, c.t_optics})
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("EfficiencyChain: fractions must be in [0,1]");
    const double per_photon = c.t_fiber * c.r_cavity * c.t_optics;
    return {per_photon, per_photon * per_photon};
}

}  // namespace cpfsim
