#pragma once

// Imperfection channels of the gate: conditional-phase jitter and cavity
// birefringence folded into the atom-photon CZ, atom preparation/detection
// errors, atomic dephasing, detector dark counts, transverse mode mismatch,
// multi-photon contamination of the weak pulses, and polarization drift in
// the output optics. Each channel is also usable standalone.

#include "cpfsim/qcore.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cpfsim {

struct ErrorParams {
    double sigma_dphi = 0.15 * pi;   // std of the conditional-phase jitter
    double xi = 0.06 * pi;           // birefringence rotation on the uncoupled branch
    double p_prep = 0.0;             // wrong-initial-atom admixture
    double p_det = 0.04;             // atomic state detection error
    double p_dark = 0.0;             // dark-count admixture of the fully mixed state
    double p_mode = 0.0;             // photon misses the cavity mode (phase 0)
    double dephase = 1.0;            // retention factor of atomic coherences per window
    double multi_photon_weight = 0.0;  // detected mode carried >= 2 photons
    double p_pol = 0.0;              // per-photon polarization scrambling in the optics

    static ErrorParams none() {
        ErrorParams e;
        e.sigma_dphi = 0.0;
        e.xi = 0.0;
        e.p_det = 0.0;
        return e;
    }
};

inline void validate(const ErrorParams& e) {
    for (double p : {e.p_prep, e.p_det, e.p_dark, e.p_mode, e.multi_photon_weight, e.p_pol, e.dephase})
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("ErrorParams: probability outside [0,1]");
    if (e.sigma_dphi < 0.0) throw std::invalid_argument("ErrorParams: sigma_dphi must be >= 0");
}

// ---------------------------------------------------------------------------
// modified atom-photon CZ
// ---------------------------------------------------------------------------

/// In-plane polarization rotation; the uncoupled branch picks this up from
/// the cavity birefringence.
inline Mat pol_rotation(double xi) {
    Mat r(2, 2);
    r << std::cos(xi), -std::sin(xi), std::sin(xi), std::cos(xi);
    return r;
}

/// Atom-photon CZ with imperfections, in the basis {upR, upL, downR, downL}:
/// phase pi+dphi on the coupled component, R_p(xi) on the uncoupled block.
/// (0, 0) reproduces the ideal diag(-1, 1, 1, 1).
inline Operator modified_cz(double dphi, double xi) {
    Mat u = Mat::Zero(4, 4);
    u(0, 0) = std::exp(ii * (pi + dphi));
    u(1, 1) = 1.0;
    u.block(2, 2, 2, 2) = pol_rotation(xi);
    return {u, true};
}

/// Reflection branch with an undetected extra photon in the qubit mode:
/// the coupled component acquires twice the conditional phase.
inline Operator modified_cz_two_photon(double dphi, double xi) {
    Mat u = Mat::Zero(4, 4);
    u(0, 0) = std::exp(ii * 2.0 * (pi + dphi));
    u(1, 1) = 1.0;
    u.block(2, 2, 2, 2) = pol_rotation(xi);
    return {u, true};
}

// ---------------------------------------------------------------------------
// channels on the joint (atom, photon1, photon2) state, dim 8;
// atom blocks are rows/cols 0..3 (up) and 4..7 (down)
// ---------------------------------------------------------------------------

/// Incoherent admixture of the wrong initial atomic state.
inline DensityMatrix prep_error_channel(const DensityMatrix& rho, double p_prep) {
    if (rho.dim() != 8) throw std::invalid_argument("prep_error_channel: need the 8-dim joint state");
    if (p_prep < 0.0 || p_prep > 1.0) throw std::invalid_argument("prep_error_channel: bad probability");
    Mat flipped(8, 8);
    flipped.block(0, 0, 4, 4) = rho.rho.block(4, 4, 4, 4);
    flipped.block(4, 4, 4, 4) = rho.rho.block(0, 0, 4, 4);
    flipped.block(0, 4, 4, 4) = rho.rho.block(4, 0, 4, 4);
    flipped.block(4, 0, 4, 4) = rho.rho.block(0, 4, 4, 4);
    return {(1.0 - p_prep) * rho.rho + p_prep * flipped, rho.physical};
}

/// Uniform reduction of the atomic off-diagonal blocks; photonic blocks
/// untouched.
inline DensityMatrix dephase_channel(const DensityMatrix& rho, double factor) {
    if (rho.dim() != 8) throw std::invalid_argument("dephase_channel: need the 8-dim joint state");
    if (factor < 0.0 || factor > 1.0) throw std::invalid_argument("dephase_channel: factor outside [0,1]");
    Mat out = rho.rho;
    out.block(0, 4, 4, 4) *= factor;
    out.block(4, 0, 4, 4) *= factor;
    return {out, rho.physical};
}

// ---------------------------------------------------------------------------
// channels on the photonic state, dim 4
// ---------------------------------------------------------------------------

/// Detector dark counts: admixture of the fully mixed two-photon state.
inline DensityMatrix dark_count_channel(const DensityMatrix& rho, double p_dark) {
    if (rho.dim() != 4) throw std::invalid_argument("dark_count_channel: need the 4-dim photonic state");
    if (p_dark < 0.0 || p_dark > 1.0) throw std::invalid_argument("dark_count_channel: bad probability");
    // scale the mixed part by the input trace so subnormalized
    // outcome-conditioned states keep their weight
    const double tr = rho.rho.trace().real();
    return {(1.0 - p_dark) * rho.rho + p_dark * tr * Mat::Identity(4, 4) / 4.0, rho.physical};
}

/// Polarization drift in the analysis optics, modeled as an independent
/// partial depolarization of each photon.
inline DensityMatrix pol_drift_channel(const DensityMatrix& rho, double p_pol) {
    if (rho.dim() != 4) throw std::invalid_argument("pol_drift_channel: need the 4-dim photonic state");
    if (p_pol < 0.0 || p_pol > 1.0) throw std::invalid_argument("pol_drift_channel: bad probability");
    const std::vector<int> dims{2, 2};
    auto depolarize = [&](const DensityMatrix& s, int photon) {
        const DensityMatrix other = partial_trace(s, {1 - photon}, dims);
        const Mat eye_half = Mat::Identity(2, 2) / 2.0 * s.rho.trace();
        const Mat replaced = photon == 0 ? kron(eye_half, other.rho) : kron(other.rho, eye_half);
        return DensityMatrix{(1.0 - p_pol) * s.rho + p_pol * replaced, s.physical};
    };
    return depolarize(depolarize(rho, 0), 1);
}

/// Atomic-state detection error: with probability p_det the feedback branch
/// of the wrong outcome is applied, i.e. the photonic submatrices
/// conditioned on the two atomic outcomes are exchanged.
/// Input and output are (state conditioned on reported down, on reported up),
/// subnormalized so the traces are the outcome probabilities.
inline std::pair<DensityMatrix, DensityMatrix> detection_error(
    const std::pair<DensityMatrix, DensityMatrix>& by_outcome, double p_det) {
    if (p_det < 0.0 || p_det > 1.0) throw std::invalid_argument("detection_error: bad probability");
    const auto& [down, up] = by_outcome;
    return {DensityMatrix{(1.0 - p_det) * down.rho + p_det * up.rho, down.physical},
            DensityMatrix{(1.0 - p_det) * up.rho + p_det * down.rho, up.physical}};
}

/// Convex reflection branches at one cavity bounce: the regular reflection,
/// the mode-mismatch branch (photon misses the cavity, phase 0), and the
/// two-photon branch (doubled conditional phase).
inline DensityMatrix apply_reflection_branches(const DensityMatrix& rho, const Operator& u_normal,
                                               const Operator& u_two_photon, double p_mode,
                                               double w_two_photon) {
    if (p_mode + w_two_photon > 1.0)
        throw std::invalid_argument("apply_reflection_branches: branch weights exceed 1");
    const double w_normal = (1.0 - p_mode) * (1.0 - w_two_photon);
    const double w_double = (1.0 - p_mode) * w_two_photon;
    Mat out = w_normal * (u_normal.u * rho.rho * u_normal.u.adjoint()) + p_mode * rho.rho +
              w_double * (u_two_photon.u * rho.rho * u_two_photon.u.adjoint());
    return {out, rho.physical};
}

}  // namespace cpfsim
