#pragma once

// The photon-photon gate circuit: atom initialized in |up>, pi/2 rotation,
// CZ reflection of photon 1, -pi/2 rotation, CZ reflection of photon 2,
// pi/2 rotation, atomic state detection and conditional phase feedback on
// photon 1. Ideal execution on state vectors, error-parametrized execution
// on density matrices with Gaussian averaging over the conditional-phase
// jitter, and the deferred-measurement equivalence with the three-
// reflection circuit.

#include "cpfsim/errors.hpp"
#include "cpfsim/qcore.hpp"
#include "cpfsim/quadrature.hpp"
#include "cpfsim/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cpfsim {

inline const std::vector<int> joint_dims{2, 2, 2};  // atom, photon1, photon2

inline StateVector atom_up() { return ket(2, 0); }
inline StateVector atom_down() { return ket(2, 1); }

/// Atomic qubit rotation in the {up, down} basis,
/// [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]].
inline Operator rotation_op(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    Mat u(2, 2);
    u << c, -s, s, c;
    return {u, true};
}

/// Atom-photon CZ in the basis {upR, upL, downR, downL}. The ideal gate is
/// diag(-1, 1, 1, 1); the error form carries the phase deviation dphi and
/// the birefringence rotation xi.
inline Operator cz_atom_photon(bool ideal, double dphi = 0.0, double xi = 0.0) {
    if (ideal) {
        Mat u = Mat::Identity(4, 4);
        u(0, 0) = -1.0;
        return {u, true};
    }
    return modified_cz(dphi, xi);
}

// ---------------------------------------------------------------------------
// embedding helpers for the 8-dim joint space (index = 4a + 2q1 + q2)
// ---------------------------------------------------------------------------

/// 4x4 atom-photon operator placed on (atom, photon1).
inline Operator embed_on_photon1(const Operator& u4) {
    return {kron(u4.u, Mat::Identity(2, 2)), u4.unitary};
}

/// 4x4 atom-photon operator placed on (atom, photon2), photon1 spectator.
inline Operator embed_on_photon2(const Operator& u4) {
    Mat out = Mat::Zero(8, 8);
    for (int a = 0; a < 2; ++a)
        for (int a2 = 0; a2 < 2; ++a2)
            for (int q1 = 0; q1 < 2; ++q1)
                for (int p = 0; p < 2; ++p)
                    for (int p2 = 0; p2 < 2; ++p2)
                        out(4 * a + 2 * q1 + p, 4 * a2 + 2 * q1 + p2) = u4.u(2 * a + p, 2 * a2 + p2);
    return {out, u4.unitary};
}

inline Operator rotation_on_atom(double theta) {
    return {kron(rotation_op(theta).u, Mat::Identity(4, 4)), true};
}

/// Conditional feedback: pi phase on the R component of photon 1,
/// diag(-1, -1, 1, 1) on the photonic pair.
inline Operator feedback_op() {
    Mat f = Mat::Identity(4, 4);
    f(0, 0) = -1.0;
    f(1, 1) = -1.0;
    return {f, true};
}

// ---------------------------------------------------------------------------
// ideal protocol on pure states
// ---------------------------------------------------------------------------

struct IdealRunResult {
    StateVector output;  // photonic output, identical for both outcomes
    double prob_down;
    double prob_up;
};

namespace detail {

/// Runs the coherent part of the circuit and returns the unnormalized
/// photonic branch amplitudes for atomic outcomes (down, up), feedback
/// already applied to the up branch.
inline std::pair<Vec, Vec> ideal_branches(const StateVector& input) {
    if (input.dim() != 4) throw std::invalid_argument("run_ideal: need a two-photon input");
    Vec psi = tensor(atom_up(), input).amps;
    const Operator cz1 = embed_on_photon1(cz_atom_photon(true));
    const Operator cz2 = embed_on_photon2(cz_atom_photon(true));
    psi = rotation_on_atom(pi / 2).u * psi;
    psi = cz1.u * psi;
    psi = rotation_on_atom(-pi / 2).u * psi;
    psi = cz2.u * psi;
    psi = rotation_on_atom(pi / 2).u * psi;
    Vec up = psi.segment(0, 4);
    Vec down = psi.segment(4, 4);
    up = feedback_op().u * up;
    return {down, up};
}

}  // namespace detail

inline IdealRunResult run_ideal(const StateVector& input) {
    validate(input);
    auto [down, up] = detail::ideal_branches(input);
    const double p_down = down.squaredNorm();
    const double p_up = up.squaredNorm();
    StateVector out{down / down.norm()};
    return {std::move(out), p_down, p_up};
}

/// The photonic 4x4 unitary the ideal protocol implements:
/// diag(1, 1, -1, 1) in {RR, RL, LR, LL}.
inline Operator cpf_operator() {
    Mat u = Mat::Identity(4, 4);
    u(2, 2) = -1.0;
    return {u, true};
}

// ---------------------------------------------------------------------------
// error-parametrized protocol
// ---------------------------------------------------------------------------

/// How the Gaussian conditional-phase jitter is averaged.
struct AveragingSpec {
    int nodes = 16;           // Gauss-Hermite nodes per reflection
    bool correlated = false;  // one common draw for both reflections
    bool monte_carlo = false; // seeded sampling instead of quadrature
    int mc_samples = 20000;
    std::uint64_t mc_seed = 1;
};

inline void validate(const AveragingSpec& avg) {
    if (avg.nodes < 1) throw std::invalid_argument("AveragingSpec: need at least one node");
    if (avg.monte_carlo && avg.mc_samples < 1)
        throw std::invalid_argument("AveragingSpec: need at least one Monte Carlo sample");
}

/// Photonic outputs conditioned on the reported atomic outcome,
/// subnormalized so that each trace is the outcome probability.
struct OutcomeSplit {
    DensityMatrix down;
    DensityMatrix up;

    DensityMatrix combined() const { return {down.rho + up.rho, down.physical && up.physical}; }
};

namespace detail {

/// One pass of the six-step sequence at fixed phase draws. Linear in the
/// input, so it is also used to assemble channel superoperators.
inline OutcomeSplit run_draw(const Mat& photons, const ErrorParams& e, double dphi1, double dphi2) {
    Mat atom_init = Mat::Zero(2, 2);
    atom_init(0, 0) = 1.0 - e.p_prep;
    atom_init(1, 1) = e.p_prep;
    DensityMatrix joint{kron(atom_init, photons), true};

    const Operator rot_plus = rotation_on_atom(pi / 2);
    const Operator rot_minus = rotation_on_atom(-pi / 2);

    joint = apply(rot_plus, joint);
    joint = apply_reflection_branches(joint, embed_on_photon1(modified_cz(dphi1, e.xi)),
                                      embed_on_photon1(modified_cz_two_photon(dphi1, e.xi)),
                                      e.p_mode, e.multi_photon_weight);
    joint = dephase_channel(joint, e.dephase);
    joint = apply(rot_minus, joint);
    joint = apply_reflection_branches(joint, embed_on_photon2(modified_cz(dphi2, e.xi)),
                                      embed_on_photon2(modified_cz_two_photon(dphi2, e.xi)),
                                      e.p_mode, e.multi_photon_weight);
    joint = dephase_channel(joint, e.dephase);
    joint = apply(rot_plus, joint);

    DensityMatrix up{joint.rho.block(0, 0, 4, 4), true};
    DensityMatrix down{joint.rho.block(4, 4, 4, 4), true};
    auto [rep_down, rep_up] = detection_error({down, up}, e.p_det);
    rep_up = apply(feedback_op(), rep_up);
    return {std::move(rep_down), std::move(rep_up)};
}

inline OutcomeSplit average_draws(const Mat& photons, const ErrorParams& e,
                                  const AveragingSpec& avg) {
    OutcomeSplit acc{{Mat::Zero(4, 4), true}, {Mat::Zero(4, 4), true}};
    auto accumulate = [&](double w, double d1, double d2) {
        OutcomeSplit s = run_draw(photons, e, d1, d2);
        acc.down.rho += w * s.down.rho;
        acc.up.rho += w * s.up.rho;
    };

    if (e.sigma_dphi == 0.0) {
        accumulate(1.0, 0.0, 0.0);
    } else if (avg.monte_carlo) {
        Rng rng(avg.mc_seed);
        const double w = 1.0 / avg.mc_samples;
        for (int s = 0; s < avg.mc_samples; ++s) {
            const double d1 = e.sigma_dphi * rng.normal();
            const double d2 = avg.correlated ? d1 : e.sigma_dphi * rng.normal();
            accumulate(w, d1, d2);
        }
    } else {
        const auto rule = gauss_hermite_normal(avg.nodes, 0.0, e.sigma_dphi);
        if (avg.correlated) {
            for (int k = 0; k < avg.nodes; ++k)
                accumulate(rule.weights[k], rule.nodes[k], rule.nodes[k]);
        } else {
            for (int k1 = 0; k1 < avg.nodes; ++k1)
                for (int k2 = 0; k2 < avg.nodes; ++k2)
                    accumulate(rule.weights[k1] * rule.weights[k2], rule.nodes[k1], rule.nodes[k2]);
        }
    }

    // dark counts and optics drift act on the analyzed photonic state and
    // are draw-independent
    acc.down = pol_drift_channel(dark_count_channel(acc.down, e.p_dark), e.p_pol);
    acc.up = pol_drift_channel(dark_count_channel(acc.up, e.p_dark), e.p_pol);
    return acc;
}

}  // namespace detail

inline OutcomeSplit run_with_errors_by_outcome(const DensityMatrix& input, const ErrorParams& e,
                                               const AveragingSpec& avg = {}) {
    if (input.dim() != 4) throw std::invalid_argument("run_with_errors: need a two-photon input");
    validate(e);
    validate(avg);
    return detail::average_draws(input.rho, e, avg);
}

inline DensityMatrix run_with_errors(const DensityMatrix& input, const ErrorParams& e,
                                     const AveragingSpec& avg = {}) {
    return run_with_errors_by_outcome(input, e, avg).combined();
}

// ---------------------------------------------------------------------------
// channel superoperators (exact-mode analysis)
// ---------------------------------------------------------------------------

/// The gate as a linear map on two-photon density matrices, split by the
/// reported atomic outcome. Column k of each matrix is vec(channel(E_k))
/// for the elementary matrix E_k in column-major vec ordering.
struct GateChannel {
    Eigen::Matrix<cd, 16, 16> down;
    Eigen::Matrix<cd, 16, 16> up;

    static Mat unvec(const Eigen::Matrix<cd, 16, 1>& v) {
        Mat m(4, 4);
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) m(r, c) = v(4 * c + r);
        return m;
    }
    static Eigen::Matrix<cd, 16, 1> vec(const Mat& m) {
        Eigen::Matrix<cd, 16, 1> v;
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) v(4 * c + r) = m(r, c);
        return v;
    }

    OutcomeSplit apply_split(const DensityMatrix& rho) const {
        return {{unvec(down * vec(rho.rho)), rho.physical},
                {unvec(up * vec(rho.rho)), rho.physical}};
    }
    DensityMatrix apply_total(const DensityMatrix& rho) const {
        return {unvec((down + up) * vec(rho.rho)), rho.physical};
    }
};

inline GateChannel build_error_channel(const ErrorParams& e, const AveragingSpec& avg = {}) {
    validate(e);
    validate(avg);
    GateChannel ch;
    for (int k = 0; k < 16; ++k) {
        Mat basis = Mat::Zero(4, 4);
        basis(k % 4, k / 4) = 1.0;
        OutcomeSplit s = detail::average_draws(basis, e, avg);
        ch.down.col(k) = GateChannel::vec(s.down.rho);
        ch.up.col(k) = GateChannel::vec(s.up.rho);
    }
    return ch;
}

inline GateChannel build_ideal_channel() { return build_error_channel(ErrorParams::none()); }

// ---------------------------------------------------------------------------
// deferred-measurement equivalence
// ---------------------------------------------------------------------------

/// Maximum trace distance, over the sample inputs, between the
/// measurement-plus-feedback circuit and the variant where the measurement
/// is deferred: a third coherent CZ reflection of photon 1 followed by
/// discarding the atom. Zero (up to rounding) certifies the equivalence.
inline double deferred_equivalence_check(const std::vector<StateVector>& inputs) {
    const GateChannel measured = build_ideal_channel();

    const Operator cz1 = embed_on_photon1(cz_atom_photon(true));
    const Operator cz2 = embed_on_photon2(cz_atom_photon(true));
    Mat u = rotation_on_atom(pi / 2).u;
    u = cz1.u * u;
    u = rotation_on_atom(-pi / 2).u * u;
    u = cz2.u * u;
    u = rotation_on_atom(pi / 2).u * u;
    u = cz1.u * u;  // deferred interaction replacing measurement + feedback

    double max_dev = 0.0;
    for (const StateVector& input : inputs) {
        validate(input);
        const DensityMatrix via_measurement = measured.apply_total(pure(input));
        DensityMatrix joint{u * pure(tensor(atom_up(), input)).rho * u.adjoint(), true};
        const DensityMatrix via_deferred = partial_trace(joint, {1, 2}, joint_dims);
        max_dev = std::max(max_dev, trace_distance(via_measurement, via_deferred));
    }
    return max_dev;
}

/// Haar-random pure state (test utility for randomized verification).
inline StateVector haar_random_state(int dim, Rng& rng) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = cd(rng.normal(), rng.normal());
    return {v / v.norm()};
}

// ---------------------------------------------------------------------------
// step-by-step trace of the ideal protocol
// ---------------------------------------------------------------------------

struct ProtocolTrace {
    struct Step {
        std::string label;
        DensityMatrix joint_state;  // dim 8
    };
    std::vector<Step> steps;
    double prob_down = 0.5;
    double prob_up = 0.5;
    bool feedback_on_up = true;
    DensityMatrix output_down;  // normalized photonic outputs per outcome
    DensityMatrix output_up;
};

inline ProtocolTrace trace_ideal(const StateVector& input) {
    validate(input);
    ProtocolTrace trace;
    Vec psi = tensor(atom_up(), input).amps;
    auto snapshot = [&](const std::string& label) {
        trace.steps.push_back({label, DensityMatrix{psi * psi.adjoint(), true}});
    };
    snapshot("initial");
    psi = rotation_on_atom(pi / 2).u * psi;
    snapshot("rotation +pi/2");
    psi = embed_on_photon1(cz_atom_photon(true)).u * psi;
    snapshot("cz photon1");
    psi = rotation_on_atom(-pi / 2).u * psi;
    snapshot("rotation -pi/2");
    psi = embed_on_photon2(cz_atom_photon(true)).u * psi;
    snapshot("cz photon2");
    psi = rotation_on_atom(pi / 2).u * psi;
    snapshot("rotation +pi/2 final");

    Vec up = feedback_op().u * psi.segment(0, 4);
    Vec down = psi.segment(4, 4);
    trace.prob_up = up.squaredNorm();
    trace.prob_down = down.squaredNorm();
    trace.output_up = DensityMatrix{up * up.adjoint() / trace.prob_up, true};
    trace.output_down = DensityMatrix{down * down.adjoint() / trace.prob_down, true};
    return trace;
}

}  // namespace cpfsim
