#pragma once

// Dense finite-dimensional quantum state/operator algebra for the gate
// simulator. Everything lives on Hilbert spaces of dimension 2, 4 or 8
// with the fixed subsystem order (atom, photon1, photon2) and basis
// orders {up, down} for the atom and {R, L} for each photon.

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cpfsim {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd ii{0.0, 1.0};

// exact-algebra and eigen-computation tolerances; double precision has
// ample headroom at dim <= 8
inline constexpr double tol_algebra = 1e-12;
inline constexpr double tol_eigen = 1e-10;

// ---------------------------------------------------------------------------
// domain types
// ---------------------------------------------------------------------------

struct StateVector {
    Vec amps;

    int dim() const { return static_cast<int>(amps.size()); }
    double norm() const { return amps.norm(); }
};

struct DensityMatrix {
    Mat rho;
    bool physical = true;  // false for raw linear-inversion estimates

    int dim() const { return static_cast<int>(rho.rows()); }
    double trace_real() const { return rho.trace().real(); }
};

struct Operator {
    Mat u;
    bool unitary = true;

    int dim() const { return static_cast<int>(u.rows()); }
};

// complete set of orthogonal projectors (measurement bookkeeping)
struct ProjectorSet {
    std::vector<Mat> projectors;
};

struct MeasureOutcome {
    double probability;
    DensityMatrix post_state;
};

// ---------------------------------------------------------------------------
// constructors and validity checks
// ---------------------------------------------------------------------------

inline StateVector ket(int dim, int index) {
    if (index < 0 || index >= dim) throw std::invalid_argument("ket: index out of range");
    Vec v = Vec::Zero(dim);
    v(index) = 1.0;
    return {v};
}

inline DensityMatrix pure(const StateVector& psi) {
    return {psi.amps * psi.amps.adjoint(), true};
}

inline DensityMatrix maximally_mixed(int dim) {
    return {Mat::Identity(dim, dim) / static_cast<double>(dim), true};
}

inline bool is_hermitian(const Mat& m, double tol = tol_algebra) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const Mat& m, double tol = tol_eigen) {
    Mat d = m.adjoint() * m - Mat::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

inline void validate(const StateVector& psi) {
    if (std::abs(psi.amps.squaredNorm() - 1.0) > tol_algebra)
        throw std::invalid_argument("StateVector: squared norm != 1");
}

inline void validate(const DensityMatrix& rho) {
    if (!is_hermitian(rho.rho)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(rho.rho.trace().real() - 1.0) > tol_algebra ||
        std::abs(rho.rho.trace().imag()) > tol_algebra)
        throw std::invalid_argument("DensityMatrix: trace != 1");
    if (rho.physical) {
        Eigen::SelfAdjointEigenSolver<Mat> es(rho.rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue on physical state");
    }
}

inline void validate(const Operator& op) {
    if (op.unitary && !is_unitary(op.u))
        throw std::invalid_argument("Operator: unitary flag set but U'U != I");
}

inline void validate(const ProjectorSet& ps) {
    if (ps.projectors.empty()) throw std::invalid_argument("ProjectorSet: empty");
    const auto dim = ps.projectors.front().rows();
    Mat sum = Mat::Zero(dim, dim);
    for (const Mat& p : ps.projectors) {
        if (p.rows() != dim || p.cols() != dim)
            throw std::invalid_argument("ProjectorSet: inconsistent dimensions");
        if (!is_hermitian(p, tol_eigen)) throw std::invalid_argument("ProjectorSet: non-Hermitian projector");
        if ((p * p - p).cwiseAbs().maxCoeff() > tol_eigen)
            throw std::invalid_argument("ProjectorSet: projector not idempotent");
        sum += p;
    }
    if ((sum - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol_eigen)
        throw std::invalid_argument("ProjectorSet: projectors do not sum to identity");
}

// ---------------------------------------------------------------------------
// tensor products (subsystem order fixed project-wide: atom, photon1, photon2)
// ---------------------------------------------------------------------------

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    Vec out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) out(i * b.dim() + j) = a.amps(i) * b.amps(j);
    return {out};
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return {kron(a.rho, b.rho), a.physical && b.physical};
}

inline Operator tensor(const Operator& a, const Operator& b) {
    return {kron(a.u, b.u), a.unitary && b.unitary};
}

// ---------------------------------------------------------------------------
// applying operators
// ---------------------------------------------------------------------------

inline StateVector apply(const Operator& op, const StateVector& psi) {
    if (op.dim() != psi.dim()) throw std::invalid_argument("apply: dimension mismatch");
    return {op.u * psi.amps};
}

inline DensityMatrix apply(const Operator& op, const DensityMatrix& rho) {
    if (op.dim() != rho.dim()) throw std::invalid_argument("apply: dimension mismatch");
    return {op.u * rho.rho * op.u.adjoint(), rho.physical};
}

/// U acting on the listed subsystems (in the order of U's tensor factors),
/// identity elsewhere. `dims` lists every subsystem dimension in the fixed
/// global order.
inline Operator embed(const Operator& op, const std::vector<int>& targets,
                      const std::vector<int>& dims) {
    const int n = static_cast<int>(dims.size());
    int total = 1;
    for (int d : dims) total *= d;

    int target_dim = 1;
    std::vector<bool> is_target(n, false);
    for (int t : targets) {
        if (t < 0 || t >= n) throw std::invalid_argument("embed: target out of range");
        if (is_target[t]) throw std::invalid_argument("embed: duplicate target");
        is_target[t] = true;
        target_dim *= dims[t];
    }
    if (target_dim != op.dim()) throw std::invalid_argument("embed: operator dim does not match targets");

    // digit decomposition of a global index in the fixed subsystem order
    auto digits_of = [&](int idx) {
        std::vector<int> d(n);
        for (int k = n - 1; k >= 0; --k) {
            d[k] = idx % dims[k];
            idx /= dims[k];
        }
        return d;
    };
    // mixed-radix index into U's basis, factors ordered as in `targets`
    auto target_index = [&](const std::vector<int>& dig) {
        int idx = 0;
        for (int t : targets) idx = idx * dims[t] + dig[t];
        return idx;
    };

    Mat out = Mat::Zero(total, total);
    for (int r = 0; r < total; ++r) {
        const auto rd = digits_of(r);
        for (int c = 0; c < total; ++c) {
            const auto cdg = digits_of(c);
            bool spectator_match = true;
            for (int k = 0; k < n && spectator_match; ++k)
                if (!is_target[k] && rd[k] != cdg[k]) spectator_match = false;
            if (spectator_match) out(r, c) = op.u(target_index(rd), target_index(cdg));
        }
    }
    return {out, op.unitary};
}

/// Reduced state on the `keep` subsystems, in their relative global order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep,
                                   const std::vector<int>& dims) {
    const int n = static_cast<int>(dims.size());
    int total = 1;
    for (int d : dims) total *= d;
    if (rho.dim() != total) throw std::invalid_argument("partial_trace: dims mismatch");

    std::vector<bool> keep_mask(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: invalid subsystem");
        if (keep_mask[k]) throw std::invalid_argument("partial_trace: duplicate subsystem");
        keep_mask[k] = true;
    }

    int keep_dim = 1, trace_dim = 1;
    std::vector<int> keep_subs, trace_subs;
    for (int k = 0; k < n; ++k) {
        if (keep_mask[k]) {
            keep_subs.push_back(k);
            keep_dim *= dims[k];
        } else {
            trace_subs.push_back(k);
            trace_dim *= dims[k];
        }
    }

    // global index from (kept digits, traced digits)
    auto global_index = [&](int kidx, int tidx) {
        std::vector<int> dig(n);
        for (auto it = keep_subs.rbegin(); it != keep_subs.rend(); ++it) {
            dig[*it] = kidx % dims[*it];
            kidx /= dims[*it];
        }
        for (auto it = trace_subs.rbegin(); it != trace_subs.rend(); ++it) {
            dig[*it] = tidx % dims[*it];
            tidx /= dims[*it];
        }
        int g = 0;
        for (int k = 0; k < n; ++k) g = g * dims[k] + dig[k];
        return g;
    };

    Mat out = Mat::Zero(keep_dim, keep_dim);
    for (int r = 0; r < keep_dim; ++r)
        for (int c = 0; c < keep_dim; ++c)
            for (int t = 0; t < trace_dim; ++t)
                out(r, c) += rho.rho(global_index(r, t), global_index(c, t));
    return {out, rho.physical};
}

// ---------------------------------------------------------------------------
// measurement and metrics
// ---------------------------------------------------------------------------

inline std::vector<MeasureOutcome> measure(const DensityMatrix& rho, const ProjectorSet& ps) {
    validate(ps);
    std::vector<MeasureOutcome> outcomes;
    double total = 0.0;
    for (const Mat& p : ps.projectors) {
        const double prob = (p * rho.rho).trace().real();
        total += prob;
        DensityMatrix post{Mat::Zero(rho.dim(), rho.dim()), rho.physical};
        if (prob > tol_algebra) post.rho = p * rho.rho * p / prob;
        outcomes.push_back({prob, std::move(post)});
    }
    if (total < tol_algebra) throw std::domain_error("measure: all outcome probabilities vanish");
    return outcomes;
}

/// <psi|rho|psi>, returned raw: non-physical linear-inversion states may
/// push it slightly outside [0, 1].
inline double fidelity_pure(const DensityMatrix& rho, const StateVector& psi) {
    if (rho.dim() != psi.dim()) throw std::invalid_argument("fidelity_pure: dimension mismatch");
    return (psi.amps.adjoint() * rho.rho * psi.amps)(0).real();
}

/// Transpose on one qubit of a two-qubit state. Output is Hermitian but in
/// general not positive.
inline Mat partial_transpose(const DensityMatrix& rho, int subsystem) {
    if (rho.dim() != 4) throw std::invalid_argument("partial_transpose: need a two-qubit state");
    if (subsystem != 0 && subsystem != 1) throw std::invalid_argument("partial_transpose: bad subsystem");
    Mat out(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    // rho_{(a b),(c d)} with subsystem-0 digits a,c and subsystem-1 digits b,d
                    const int r = 2 * a + b, col = 2 * c + d;
                    const int rt = subsystem == 0 ? 2 * c + b : 2 * a + d;
                    const int ct = subsystem == 0 ? 2 * a + d : 2 * c + b;
                    out(rt, ct) = rho.rho(r, col);
                }
    return out;
}

inline double min_eigenvalue(const Mat& h) {
    if (!is_hermitian(h, 1e-8)) throw std::invalid_argument("min_eigenvalue: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double p) {
    if (a.dim() != b.dim()) throw std::invalid_argument("mix: dimension mismatch");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("mix: weight outside [0,1]");
    return {(1.0 - p) * a.rho + p * b.rho, a.physical && b.physical};
}

/// 0.5 * ||a - b||_1; standard distinguishability metric.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.rho - b.rho, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Trace distance between pure states modulo global phase.
inline double trace_distance(const StateVector& a, const StateVector& b) {
    return trace_distance(pure(a), pure(b));
}

}  // namespace cpfsim
