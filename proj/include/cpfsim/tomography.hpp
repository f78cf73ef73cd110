#pragma once

// Polarization tomography of the photon pair: Born-rule count simulation in
// the nine two-basis settings, unbiased linear-inversion reconstruction with
// propagated statistical errors, and the derived gate metrics (truth table,
// Bell fidelity, 36-state average gate fidelity, entangling capability).

#include "cpfsim/protocol.hpp"
#include "cpfsim/qcore.hpp"
#include "cpfsim/rng.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpfsim {

// ---------------------------------------------------------------------------
// polarization states and measurement bases
// ---------------------------------------------------------------------------

/// Single-photon polarization state in the {R, L} amplitude convention:
/// H = (R+L)/sqrt2, V = (R-L)/sqrt2, D = (R+iL)/sqrt2, A = -(iR+L)/sqrt2.
inline StateVector pol_state(char label) {
    const double s = 1.0 / std::numbers::sqrt2;
    Vec v(2);
    switch (label) {
        case 'R': v << 1.0, 0.0; break;
        case 'L': v << 0.0, 1.0; break;
        case 'H': v << s, s; break;
        case 'V': v << s, -s; break;
        case 'D': v << s, ii * s; break;
        case 'A': v << -ii * s, -s; break;
        default: throw std::invalid_argument("pol_state: unknown label");
    }
    return {v};
}

inline constexpr std::array<char, 6> pol_labels{'H', 'V', 'D', 'A', 'R', 'L'};

/// Measurement axes; each is a mutually unbiased single-photon basis.
enum class Axis : int { HV = 0, DA = 1, RL = 2 };

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::HV: return "HV";
        case Axis::DA: return "DA";
        default: return "RL";
    }
}

inline std::optional<Axis> axis_from_name(const std::string& name) {
    if (name == "HV") return Axis::HV;
    if (name == "DA") return Axis::DA;
    if (name == "RL") return Axis::RL;
    return std::nullopt;
}

/// Pauli operator whose eigenbasis the axis measures (in the {R,L} basis).
inline Mat axis_operator(Axis a) {
    Mat m(2, 2);
    switch (a) {
        case Axis::HV: m << 0, 1, 1, 0; break;
        case Axis::DA: m << 0, -ii, ii, 0; break;
        case Axis::RL: m << 1, 0, 0, -1; break;
    }
    return m;
}

/// The two eigenstate labels of an axis, +1 outcome first.
inline std::array<char, 2> axis_states(Axis a) {
    switch (a) {
        case Axis::HV: return {'H', 'V'};
        case Axis::DA: return {'D', 'A'};
        default: return {'R', 'L'};
    }
}

inline const std::array<std::pair<Axis, Axis>, 9>& tomography_settings() {
    static const std::array<std::pair<Axis, Axis>, 9> settings = [] {
        std::array<std::pair<Axis, Axis>, 9> s{};
        int k = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) s[k++] = {static_cast<Axis>(a), static_cast<Axis>(b)};
        return s;
    }();
    return settings;
}

/// Born probabilities of the four coincidence outcomes of one setting;
/// outcome index 2*o1 + o2 with o = 0 for the +1 eigenstate.
inline std::array<double, 4> setting_probabilities(const DensityMatrix& rho, Axis a1, Axis a2) {
    if (rho.dim() != 4) throw std::invalid_argument("setting_probabilities: need a two-photon state");
    std::array<double, 4> p{};
    const auto s1 = axis_states(a1), s2 = axis_states(a2);
    for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2) {
            const StateVector out = tensor(pol_state(s1[o1]), pol_state(s2[o2]));
            p[2 * o1 + o2] = std::max(0.0, fidelity_pure(rho, out));
        }
    return p;
}

// ---------------------------------------------------------------------------
// count records
// ---------------------------------------------------------------------------

struct CountRecord {
    Axis axis1;
    Axis axis2;
    std::array<long, 4> counts{};  // index 2*o1 + o2
    long shots = 0;
};

/// Fixed allocation: `shots` coincidences per listed setting, per-setting
/// derived seed streams so the records are independent of evaluation order.
inline std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                                const std::vector<std::pair<Axis, Axis>>& settings,
                                                long shots, std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("simulate_counts: shots must be positive");
    std::vector<CountRecord> records;
    records.reserve(settings.size());
    for (std::size_t s = 0; s < settings.size(); ++s) {
        const auto [a1, a2] = settings[s];
        const auto p = setting_probabilities(rho, a1, a2);
        Rng rng = Rng::stream(seed, s);
        const auto counts = rng.multinomial(shots, {p[0], p[1], p[2], p[3]});
        CountRecord rec{a1, a2, {}, shots};
        for (int k = 0; k < 4; ++k) rec.counts[k] = counts[k];
        records.push_back(rec);
    }
    return records;
}

/// Randomized tomographically complete acquisition: every coincidence is
/// assigned to one of the nine settings uniformly at random. Allocations
/// that leave a setting empty are redrawn, which keeps the per-setting
/// frequencies unbiased (the redraw only conditions on the allocation).
inline std::vector<CountRecord> simulate_counts_randomized(const DensityMatrix& rho,
                                                           long total_pairs, std::uint64_t seed) {
    if (total_pairs <= 0) throw std::invalid_argument("simulate_counts_randomized: need pairs > 0");
    if (total_pairs < 9)
        throw std::invalid_argument("simulate_counts_randomized: fewer pairs than settings");
    Rng rng(seed);

    std::array<long, 9> alloc{};
    for (int attempt = 0; attempt < 10000; ++attempt) {
        alloc.fill(0);
        for (long s = 0; s < total_pairs; ++s)
            ++alloc[static_cast<int>(rng.uniform() * 9.0) % 9];
        bool ok = true;
        for (long n : alloc) ok = ok && n > 0;
        if (ok) break;
        if (attempt == 9999)
            throw std::domain_error("simulate_counts_randomized: could not cover all settings");
    }

    std::vector<CountRecord> records;
    const auto& settings = tomography_settings();
    for (int s = 0; s < 9; ++s) {
        const auto [a1, a2] = settings[s];
        const auto p = setting_probabilities(rho, a1, a2);
        const auto counts = rng.multinomial(alloc[s], {p[0], p[1], p[2], p[3]});
        CountRecord rec{a1, a2, {}, alloc[s]};
        for (int k = 0; k < 4; ++k) rec.counts[k] = counts[k];
        records.push_back(rec);
    }
    return records;
}

// ---------------------------------------------------------------------------
// linear inversion
// ---------------------------------------------------------------------------

struct ReconstructedState {
    DensityMatrix rho_hat;              // Hermitian, unit trace; physical=false
    Eigen::Matrix<double, 16, 16> covariance;  // over the orthonormal Pauli
                                               // basis coefficients theta_k,
                                               // rho = sum_k theta_k B_k with
                                               // B_k = (sigma_i x sigma_j)/2
};

namespace detail {

inline Mat pauli(int i) {
    Mat m(2, 2);
    switch (i) {
        case 0: m = Mat::Identity(2, 2); break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, -ii, ii, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

/// Frequencies of one setting plus the shot count used for covariance.
struct FrequencyRecord {
    Axis axis1;
    Axis axis2;
    std::array<double, 4> freq{};
    double shots = 1.0;
};

inline ReconstructedState invert_frequencies(const std::vector<FrequencyRecord>& records) {
    // index settings by (axis1, axis2); require the full 3x3 grid
    std::array<std::array<const FrequencyRecord*, 3>, 3> grid{};
    for (const auto& rec : records) {
        grid[static_cast<int>(rec.axis1)][static_cast<int>(rec.axis2)] = &rec;
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (grid[a][b] == nullptr)
                throw std::domain_error(
                    "linear_inversion: settings not tomographically complete (rank-deficient)");

    // correlators and marginals; single-qubit terms average the three
    // settings that share the axis
    auto corr = [&](const FrequencyRecord& r) {
        return r.freq[0] - r.freq[1] - r.freq[2] + r.freq[3];
    };
    auto marg1 = [&](const FrequencyRecord& r) {
        return r.freq[0] + r.freq[1] - r.freq[2] - r.freq[3];
    };
    auto marg2 = [&](const FrequencyRecord& r) {
        return r.freq[0] - r.freq[1] + r.freq[2] - r.freq[3];
    };

    Eigen::Matrix<double, 16, 1> c = Eigen::Matrix<double, 16, 1>::Zero();
    c(0) = 1.0;
    for (int a = 0; a < 3; ++a) {
        double m = 0.0;
        for (int b = 0; b < 3; ++b) m += marg1(*grid[a][b]);
        c(4 * (a + 1)) = m / 3.0;
    }
    for (int b = 0; b < 3; ++b) {
        double m = 0.0;
        for (int a = 0; a < 3; ++a) m += marg2(*grid[a][b]);
        c(b + 1) = m / 3.0;
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) c(4 * (a + 1) + (b + 1)) = corr(*grid[a][b]);

    Mat rho = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho += c(4 * i + j) * kron(pauli(i), pauli(j)) / 4.0;

    // linear error propagation from independent multinomial statistics:
    // c = J f with block-diagonal multinomial covariance per setting
    Eigen::Matrix<double, 16, 36> jac = Eigen::Matrix<double, 16, 36>::Zero();
    Eigen::Matrix<double, 36, 36> cov_f = Eigen::Matrix<double, 36, 36>::Zero();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const auto& rec = *grid[a][b];
            const int col0 = 4 * (3 * a + b);
            static constexpr std::array<double, 4> sign1{1, 1, -1, -1};
            static constexpr std::array<double, 4> sign2{1, -1, 1, -1};
            for (int o = 0; o < 4; ++o) {
                jac(4 * (a + 1) + (b + 1), col0 + o) = sign1[o] * sign2[o];
                jac(4 * (a + 1), col0 + o) = sign1[o] / 3.0;
                jac(b + 1, col0 + o) = sign2[o] / 3.0;
            }
            for (int o = 0; o < 4; ++o)
                for (int q = 0; q < 4; ++q)
                    cov_f(col0 + o, col0 + q) =
                        ((o == q ? rec.freq[o] : 0.0) - rec.freq[o] * rec.freq[q]) / rec.shots;
        }
    const Eigen::Matrix<double, 16, 16> cov_c = jac * cov_f * jac.transpose();

    ReconstructedState out;
    out.rho_hat = DensityMatrix{rho, false};
    out.covariance = cov_c / 4.0;  // theta_k = c_k / 2
    return out;
}

}  // namespace detail

inline ReconstructedState linear_inversion(const std::vector<CountRecord>& records) {
    std::vector<detail::FrequencyRecord> freq;
    freq.reserve(records.size());
    for (const auto& rec : records) {
        long total = 0;
        for (long n : rec.counts) total += n;
        if (total != rec.shots) throw std::invalid_argument("linear_inversion: counts do not sum to shots");
        if (rec.shots <= 0) throw std::invalid_argument("linear_inversion: empty setting");
        detail::FrequencyRecord f{rec.axis1, rec.axis2, {}, static_cast<double>(rec.shots)};
        for (int k = 0; k < 4; ++k) f.freq[k] = static_cast<double>(rec.counts[k]) / rec.shots;
        freq.push_back(f);
    }
    return detail::invert_frequencies(freq);
}

/// Inversion of exact Born probabilities (the infinite-statistics limit).
inline ReconstructedState linear_inversion_exact(const DensityMatrix& rho) {
    std::vector<detail::FrequencyRecord> freq;
    for (const auto& [a1, a2] : tomography_settings()) {
        const auto p = setting_probabilities(rho, a1, a2);
        freq.push_back({a1, a2, p, 1.0});
    }
    return detail::invert_frequencies(freq);
}

/// Condition number of the Born-rule map from the 16 state coefficients to
/// the 36 outcome probabilities of the nine settings.
inline double tomography_condition_number() {
    Eigen::MatrixXd design(36, 16);
    int row = 0;
    for (const auto& [a1, a2] : tomography_settings()) {
        const auto s1 = axis_states(a1), s2 = axis_states(a2);
        for (int o1 = 0; o1 < 2; ++o1)
            for (int o2 = 0; o2 < 2; ++o2) {
                const StateVector out = tensor(pol_state(s1[o1]), pol_state(s2[o2]));
                const Mat proj = out.amps * out.amps.adjoint();
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) {
                        const Mat basis = kron(detail::pauli(i), detail::pauli(j)) / 2.0;
                        design(row, 4 * i + j) = (proj * basis).trace().real();
                    }
                ++row;
            }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
    return svd.singularValues()(0) / svd.singularValues()(15);
}

/// sqrt(Var Re + Var Im) of every density-matrix entry, from the propagated
/// coefficient covariance.
inline Eigen::Matrix4d entry_standard_errors(const ReconstructedState& recon) {
    Eigen::Matrix4d err;
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 4; ++col) {
            Eigen::Matrix<double, 16, 1> wre, wim;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const cd b = (kron(detail::pauli(i), detail::pauli(j)) / 2.0)(r, col);
                    wre(4 * i + j) = b.real();
                    wim(4 * i + j) = b.imag();
                }
            const double var = wre.dot(recon.covariance * wre) + wim.dot(recon.covariance * wim);
            err(r, col) = std::sqrt(std::max(0.0, var));
        }
    return err;
}

inline double rms_entry_error(const ReconstructedState& recon) {
    const Eigen::Matrix4d err = entry_standard_errors(recon);
    return std::sqrt(err.array().square().mean());
}

struct ValueWithError {
    double value;
    double stderror;
};

/// Unbiased linear fidelity estimate <psi|rho_hat|psi> with its propagated
/// standard error.
inline ValueWithError fidelity_estimate(const ReconstructedState& recon, const StateVector& psi) {
    Eigen::Matrix<double, 16, 1> w;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const Mat basis = kron(detail::pauli(i), detail::pauli(j)) / 2.0;
            w(4 * i + j) = (psi.amps.adjoint() * basis * psi.amps)(0).real();
        }
    const double f = fidelity_pure(recon.rho_hat, psi);
    const double var = w.dot(recon.covariance * w);
    return {f, std::sqrt(std::max(0.0, var))};
}

// ---------------------------------------------------------------------------
// gate metrics
// ---------------------------------------------------------------------------

struct TruthTable {
    // rows: inputs RH, RV, LH, LV; columns: measured outputs in the same order
    std::array<std::array<double, 4>, 4> p{};
    double f_cnot = 0.0;
};

inline const std::array<std::pair<char, char>, 4>& cnot_basis_inputs() {
    static const std::array<std::pair<char, char>, 4> inputs{
        {{'R', 'H'}, {'R', 'V'}, {'L', 'H'}, {'L', 'V'}}};
    return inputs;
}

/// Truth table in the CNOT basis {R,L} x {H,V}. shots = 0 evaluates exact
/// Born probabilities; otherwise multinomial sampling with the given seed.
inline TruthTable truth_table(const GateChannel& channel, long shots = 0, std::uint64_t seed = 0) {
    TruthTable table;
    const auto& inputs = cnot_basis_inputs();
    const Operator cpf = cpf_operator();
    for (int in = 0; in < 4; ++in) {
        const StateVector psi_in = tensor(pol_state(inputs[in].first), pol_state(inputs[in].second));
        const DensityMatrix rho_out = channel.apply_total(pure(psi_in));
        const StateVector psi_ideal = apply(cpf, psi_in);

        std::array<double, 4> probs{};
        int ideal_index = -1;
        double best_overlap = -1.0;
        for (int out = 0; out < 4; ++out) {
            const StateVector meas =
                tensor(pol_state(inputs[out].first), pol_state(inputs[out].second));
            probs[out] = std::max(0.0, fidelity_pure(rho_out, meas));
            const double overlap = std::norm((meas.amps.adjoint() * psi_ideal.amps)(0));
            if (overlap > best_overlap) {
                best_overlap = overlap;
                ideal_index = out;
            }
        }
        if (shots > 0) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(in));
            const auto counts = rng.multinomial(shots, {probs[0], probs[1], probs[2], probs[3]});
            for (int out = 0; out < 4; ++out)
                probs[out] = static_cast<double>(counts[out]) / static_cast<double>(shots);
        }
        table.p[in] = probs;
        table.f_cnot += probs[ideal_index] / 4.0;
    }
    return table;
}

struct AverageFidelityResult {
    double value;
    double stderror;  // 0 in exact mode
    std::array<double, 36> per_state{};
};

/// Average fidelity of the 36 output states generated from the product
/// inputs on all canonical polarization axes. pairs_per_state = 0 computes
/// the exact channel fidelities; otherwise each state is estimated from
/// sampled counts in randomized tomographically complete settings.
inline AverageFidelityResult average_gate_fidelity(const GateChannel& channel,
                                                   long pairs_per_state = 0,
                                                   std::uint64_t seed = 0) {
    AverageFidelityResult result{0.0, 0.0, {}};
    const Operator cpf = cpf_operator();
    double var_sum = 0.0;
    int idx = 0;
    for (char l1 : pol_labels)
        for (char l2 : pol_labels) {
            const StateVector psi_in = tensor(pol_state(l1), pol_state(l2));
            const StateVector target = apply(cpf, psi_in);
            const DensityMatrix rho_out = channel.apply_total(pure(psi_in));
            double f;
            if (pairs_per_state <= 0) {
                f = fidelity_pure(rho_out, target);
            } else {
                const auto records = simulate_counts_randomized(
                    rho_out, pairs_per_state, Rng::derive_seed(seed, static_cast<std::uint64_t>(idx)));
                const auto recon = linear_inversion(records);
                const auto est = fidelity_estimate(recon, target);
                f = est.value;
                var_sum += est.stderror * est.stderror;
            }
            result.per_state[idx++] = f;
            result.value += f / 36.0;
        }
    result.stderror = std::sqrt(var_sum) / 36.0;
    return result;
}

/// Smallest eigenvalue of the partial transpose; negative values certify
/// entanglement (-0.5 for a maximally entangled pair).
inline double entangling_capability(const DensityMatrix& rho) {
    return min_eigenvalue(partial_transpose(rho, 0));
}

struct OutcomeFidelities {
    double f_down;
    double f_up;
};

/// Fidelity with the ideal output conditioned on the reported atomic
/// outcome (both equal in the ideal protocol).
inline OutcomeFidelities split_by_outcome(const GateChannel& channel, const StateVector& input) {
    const StateVector target = apply(cpf_operator(), input);
    const OutcomeSplit split = channel.apply_split(pure(input));
    const double t_down = split.down.rho.trace().real();
    const double t_up = split.up.rho.trace().real();
    return {fidelity_pure(split.down, target) / t_down, fidelity_pure(split.up, target) / t_up};
}

}  // namespace cpfsim
