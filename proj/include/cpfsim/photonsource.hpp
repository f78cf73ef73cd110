#pragma once

// Weak-coherent-pulse photon-number statistics: multi-photon contamination
// of the qubit modes and coincidence rates, with a configurable placement
// of the optical losses relative to the gate.

#include <cmath>
#include <stdexcept>

namespace cpfsim {

struct PulseStats {
    double nbar = 0.17;      // mean photon number per pulse at the cavity
    double eta_chain = 0.11; // end-to-end detection efficiency per photon
};

inline void validate(const PulseStats& s) {
    if (s.nbar <= 0.0) throw std::invalid_argument("PulseStats: nbar must be positive");
    if (s.eta_chain <= 0.0 || s.eta_chain > 1.0)
        throw std::invalid_argument("PulseStats: eta_chain must be in (0,1]");
}

/// Where the optical losses act relative to the reflection. `BeforeGate`
/// treats nbar as the surviving mean, so every photon present at the cavity
/// is detected; `AfterGate` thins the detection with eta_chain while the
/// cavity sees the full Poisson distribution.
enum class LossConvention { BeforeGate, AfterGate };

// photon-number cutoff for enumerations; tail mass < 1e-12 at nbar = 0.17
inline constexpr int photon_number_cutoff = 10;

inline double poisson_pn(double nbar, int n) {
    if (n < 0) throw std::invalid_argument("poisson_pn: n must be nonnegative");
    double p = std::exp(-nbar);
    for (int k = 1; k <= n; ++k) p *= nbar / static_cast<double>(k);
    return p;
}

/// Conditional probability that a detected qubit mode carried two or more
/// photons at the cavity.
inline double multi_photon_weight(const PulseStats& s, LossConvention convention) {
    validate(s);
    const double eta = convention == LossConvention::BeforeGate ? 1.0 : s.eta_chain;
    double detected = 0.0, detected_multi = 0.0;
    for (int n = 1; n <= photon_number_cutoff; ++n) {
        const double p_click = 1.0 - std::pow(1.0 - eta, n);
        const double term = poisson_pn(s.nbar, n) * p_click;
        detected += term;
        if (n >= 2) detected_multi += term;
    }
    return detected_multi / detected;
}

/// Probability per trial that both temporal output modes register at least
/// one detection (independent Poisson pulses thinned by eta_chain).
inline double coincidence_probability(const PulseStats& s) {
    validate(s);
    const double p_click = 1.0 - std::exp(-s.eta_chain * s.nbar);
    return p_click * p_click;
}

inline double coincidence_probability(double nbar, double eta) {
    const double p_click = 1.0 - std::exp(-eta * nbar);
    return p_click * p_click;
}

}  // namespace cpfsim
