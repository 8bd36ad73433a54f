// kdq.hpp
// Kirkwood-Dirac joint quasi-probabilities P(m,b|a) and the transformation
// identities that relate their phases to unitary dynamics along m.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kdqlab/qcore.hpp"

namespace kdqlab {

/// Reduces an angle to (-pi, pi].
inline double wrap_phase(double phi) {
    double y = std::remainder(phi, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    return y;
}

/// Generator eigenbasis M with action phases phi(m) = S(m)/hbar.
class ActionSpectrum {
  public:
    ActionSpectrum(OrthonormalBasis basis, std::vector<double> phase) : basis_(std::move(basis)) {
        if (phase.size() != basis_.dim()) {
            throw DimensionError("ActionSpectrum: " + std::to_string(phase.size()) + " phases for dimension " +
                                 std::to_string(basis_.dim()));
        }
        for (double p : phase) {
            if (!std::isfinite(p)) throw std::invalid_argument("ActionSpectrum: non-finite phase");
            phase_.push_back(wrap_phase(p));
        }
    }

    const OrthonormalBasis& basis() const { return basis_; }
    const std::vector<double>& phase() const { return phase_; }
    std::size_t dim() const { return basis_.dim(); }

  private:
    OrthonormalBasis basis_;
    std::vector<double> phase_;
};

/// Complex table P(m,b|a) indexed [m][b], together with its defining
/// preparation and bases. Only kd_joint constructs one.
class KDDistribution {
  public:
    const StateVector& state_a() const { return a_; }
    const OrthonormalBasis& basis_m() const { return m_; }
    const OrthonormalBasis& basis_b() const { return b_; }
    std::size_t dim() const { return a_.dim(); }
    const Complex& at(std::size_t m, std::size_t b) const { return table_[m * dim() + b]; }
    std::span<const Complex> table() const { return table_; }

  private:
    KDDistribution(StateVector a, OrthonormalBasis m, OrthonormalBasis b, std::vector<Complex> table)
        : a_(std::move(a)), m_(std::move(m)), b_(std::move(b)), table_(std::move(table)) {}

    friend KDDistribution kd_joint(const StateVector&, const OrthonormalBasis&, const OrthonormalBasis&);

    StateVector a_;
    OrthonormalBasis m_;
    OrthonormalBasis b_;
    std::vector<Complex> table_;
};

/// P(m,b|a) = <b|m><m|a><a|b>: weak measurement of m, then precise measurement of b.
inline KDDistribution kd_joint(const StateVector& a, const OrthonormalBasis& basis_m, const OrthonormalBasis& basis_b) {
    detail::require_same_dim(a.dim(), basis_m.dim(), "kd_joint");
    detail::require_same_dim(a.dim(), basis_b.dim(), "kd_joint");
    if (!a.is_normalized()) throw std::invalid_argument("kd_joint: preparation is not normalized");
    const std::size_t d = a.dim();
    std::vector<Complex> table(d * d);
    for (std::size_t m = 0; m < d; ++m) {
        const Complex ma = inner(basis_m[m], a);
        for (std::size_t b = 0; b < d; ++b) {
            table[m * d + b] = inner(basis_b[b], basis_m[m]) * ma * inner(a, basis_b[b]);
        }
    }
    return KDDistribution(a, basis_m, basis_b, std::move(table));
}

struct Marginals {
    std::vector<double> prob_m;
    std::vector<double> prob_b;
};

/// Row and column sums. Throws InvariantError if a sum is not a real
/// probability within kTol; values are clamped to [0, 1] only afterwards.
inline Marginals marginals(const KDDistribution& kd) {
    const std::size_t d = kd.dim();
    std::vector<Complex> rows(d), cols(d);
    for (std::size_t m = 0; m < d; ++m) {
        for (std::size_t b = 0; b < d; ++b) {
            rows[m] += kd.at(m, b);
            cols[b] += kd.at(m, b);
        }
    }
    auto finish = [](const std::vector<Complex>& sums, const char* what) {
        std::vector<double> out;
        double total = 0.0;
        for (const auto& s : sums) {
            if (std::abs(s.imag()) > kTol || s.real() < -kTol || s.real() > 1.0 + kTol) {
                throw InvariantError(std::string("marginals: ") + what + " sum is not a probability");
            }
            out.push_back(std::clamp(s.real(), 0.0, 1.0));
            total += s.real();
        }
        if (std::abs(total - 1.0) > kTol) {
            throw InvariantError(std::string("marginals: ") + what + " marginal does not sum to 1");
        }
        return out;
    };
    return {finish(rows, "row"), finish(cols, "column")};
}

/// P(b|a) for column b, read off the table.
inline double postselection_probability(const KDDistribution& kd, std::size_t b_index) {
    Complex s{};
    for (std::size_t m = 0; m < kd.dim(); ++m) s += kd.at(m, b_index);
    return s.real();
}

/// <b|A|a> / <b|a>
inline Complex weak_value(const StateVector& a, const StateVector& b, const Operator& op) {
    const Complex ba = inner(b, a);
    if (std::abs(ba) <= kTol) {
        throw UndefinedError("weak_value: pre- and post-selected states are orthogonal");
    }
    return inner(b, op * a) / ba;
}

/// U = sum_m |m><m| e^{-i phi(m)}
inline Operator unitary_from_actions(const ActionSpectrum& spectrum) {
    const std::size_t d = spectrum.dim();
    Operator u = Operator::zero(d);
    for (std::size_t m = 0; m < d; ++m) {
        u = u + std::polar(1.0, -spectrum.phase()[m]) * projector(spectrum.basis()[m]);
    }
    return u;
}

/// P(b|U(a)) = |<b|U|a>|^2
inline double overlap_direct(const StateVector& a, const StateVector& b, const Operator& u) {
    detail::require_same_dim(a.dim(), b.dim(), "overlap_direct");
    detail::require_same_dim(a.dim(), u.dim(), "overlap_direct");
    if (!is_unitary(u)) throw std::invalid_argument("overlap_direct: operator is not unitary");
    return std::norm(inner(b, u * a));
}

/// P(b|U(a)) = |sum_m P(m,b|a) e^{-i phi(m)}|^2 / P(b|a), computed from the
/// quasi-probabilities alone.
inline double overlap_from_kd(const KDDistribution& kd, const ActionSpectrum& spectrum, std::size_t b_index) {
    if (b_index >= kd.dim()) throw std::out_of_range("overlap_from_kd: b index out of range");
    if (!spectrum.basis().same_rays(kd.basis_m())) {
        throw std::invalid_argument("overlap_from_kd: action spectrum basis differs from the KD m-basis");
    }
    const double pb = postselection_probability(kd, b_index);
    if (pb <= kTol) {
        throw UndefinedError("overlap_from_kd: P(b|a) vanishes for b = '" + kd.basis_b().label(b_index) + "'");
    }
    Complex s{};
    for (std::size_t m = 0; m < kd.dim(); ++m) s += kd.at(m, b_index) * std::polar(1.0, -spectrum.phase()[m]);
    return std::norm(s) / pb;
}

/// Arg P(m,b|a): the action phase that maximizes the overlap into b.
inline double optimal_action(const KDDistribution& kd, std::size_t m_index, std::size_t b_index) {
    if (m_index >= kd.dim() || b_index >= kd.dim()) throw std::out_of_range("optimal_action: index out of range");
    const Complex p = kd.at(m_index, b_index);
    if (std::abs(p) <= kTol) {
        throw UndefinedError("optimal_action: entry (" + kd.basis_m().label(m_index) + ", " +
                             kd.basis_b().label(b_index) + ") has vanishing modulus");
    }
    return wrap_phase(std::arg(p));
}

/// True iff U^2 is proportional to the identity, i.e. all pairwise phase
/// differences are 0 or pi.
inline bool is_half_periodic(const ActionSpectrum& spectrum) {
    const auto& ph = spectrum.phase();
    const Complex ref = std::polar(1.0, -2.0 * ph.front());
    for (double p : ph) {
        if (std::abs(std::polar(1.0, -2.0 * p) - ref) > kTol) return false;
    }
    return true;
}

struct NegativityReport {
    double total_negativity = 0.0;
    double min_real = 0.0;
    std::pair<std::string, std::string> argmin;
    double max_abs_phase = 0.0;
};

inline NegativityReport negativity(const KDDistribution& kd) {
    NegativityReport r;
    r.min_real = kd.at(0, 0).real();
    r.argmin = {kd.basis_m().label(0), kd.basis_b().label(0)};
    for (std::size_t m = 0; m < kd.dim(); ++m) {
        for (std::size_t b = 0; b < kd.dim(); ++b) {
            const Complex p = kd.at(m, b);
            r.total_negativity += std::max(0.0, -p.real());
            if (p.real() < r.min_real) {
                r.min_real = p.real();
                r.argmin = {kd.basis_m().label(m), kd.basis_b().label(b)};
            }
            if (std::abs(p) > kTol) r.max_abs_phase = std::max(r.max_abs_phase, std::abs(std::arg(p)));
        }
    }
    return r;
}

/// Dirac reconstruction rho = sum_{m,b} P(m,b|a)/<b|m> |m><b|.
inline Operator reconstruct_state(const KDDistribution& kd) {
    const std::size_t d = kd.dim();
    Operator rho = Operator::zero(d);
    for (std::size_t m = 0; m < d; ++m) {
        for (std::size_t b = 0; b < d; ++b) {
            const Complex bm = inner(kd.basis_b()[b], kd.basis_m()[m]);
            if (std::abs(bm) <= kTol) {
                throw UndefinedError("reconstruct_state: <b|m> vanishes for (m, b) = (" + kd.basis_m().label(m) +
                                     ", " + kd.basis_b().label(b) + ")");
            }
            rho = rho + (kd.at(m, b) / bm) * outer(kd.basis_m()[m], kd.basis_b()[b]);
        }
    }
    return rho;
}

}  // namespace kdqlab
