// qcore.hpp
// Dense complex linear algebra for small Hilbert spaces (d <= 16): state
// vectors, operators, orthonormal bases and the Pauli/Bloch constructors.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kdqlab {

using Complex = std::complex<double>;

/// Tolerance for every analytic identity in the library.
inline constexpr double kTol = 1e-10;

/// Largest supported Hilbert-space dimension.
inline constexpr std::size_t kMaxDim = 16;

inline constexpr double kPi = std::numbers::pi;

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A quantity that is mathematically undefined at the given input
/// (zero denominators, phases of vanishing entries, ill-posed inversions).
class UndefinedError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// An internal consistency check failed; indicates a bug upstream.
class InvariantError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

namespace detail {

inline void require_dim(std::size_t dim) {
    if (dim == 0 || dim > kMaxDim) {
        throw DimensionError("dimension " + std::to_string(dim) + " outside [1, " +
                             std::to_string(kMaxDim) + "]");
    }
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

inline void require_finite(std::span<const Complex> values, const char* what) {
    for (const auto& z : values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw std::invalid_argument(std::string(what) + ": non-finite component");
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

class StateVector {
  public:
    /// Normalizes and fixes the global phase so that the first amplitude with
    /// modulus > 1e-12 is real and positive.
    static StateVector normalized(std::vector<Complex> amp) {
        StateVector v = raw(std::move(amp));
        const double n = v.norm();
        if (n < 1e-300) {
            throw std::invalid_argument("StateVector::normalized: zero vector");
        }
        Complex phase{1.0, 0.0};
        for (const auto& z : v.amp_) {
            if (std::abs(z) > 1e-12) {
                phase = std::conj(z) / std::abs(z);
                break;
            }
        }
        for (auto& z : v.amp_) {
            z = z * phase / n;
        }
        return v;
    }

    /// Unnormalized vector for intermediate arithmetic.
    static StateVector raw(std::vector<Complex> amp) {
        detail::require_dim(amp.size());
        detail::require_finite(amp, "StateVector");
        StateVector v;
        v.amp_ = std::move(amp);
        return v;
    }

    static StateVector basis(std::size_t dim, std::size_t index) {
        detail::require_dim(dim);
        if (index >= dim) {
            throw std::out_of_range("StateVector::basis: index out of range");
        }
        std::vector<Complex> amp(dim);
        amp[index] = 1.0;
        return raw(std::move(amp));
    }

    std::size_t dim() const { return amp_.size(); }
    const Complex& operator[](std::size_t i) const { return amp_[i]; }
    std::span<const Complex> amplitudes() const { return amp_; }

    double norm() const {
        double s = 0.0;
        for (const auto& z : amp_) s += std::norm(z);
        return std::sqrt(s);
    }

    bool is_normalized(double tol = kTol) const { return std::abs(norm() - 1.0) <= tol; }

    StateVector scaled(Complex c) const {
        auto amp = amp_;
        for (auto& z : amp) z *= c;
        return raw(std::move(amp));
    }

    friend StateVector operator+(const StateVector& u, const StateVector& v) {
        detail::require_same_dim(u.dim(), v.dim(), "StateVector +");
        auto amp = u.amp_;
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] += v.amp_[i];
        return raw(std::move(amp));
    }

    friend StateVector operator-(const StateVector& u, const StateVector& v) {
        return u + v.scaled(-1.0);
    }

  private:
    StateVector() = default;
    std::vector<Complex> amp_;
};

/// <u|v> = sum_k conj(u_k) v_k
inline Complex inner(const StateVector& u, const StateVector& v) {
    detail::require_same_dim(u.dim(), v.dim(), "inner");
    Complex s{};
    for (std::size_t k = 0; k < u.dim(); ++k) s += std::conj(u[k]) * v[k];
    return s;
}

/// Amplitude-wise distance, max_k |u_k - v_k|.
inline double max_abs_diff(const StateVector& u, const StateVector& v) {
    detail::require_same_dim(u.dim(), v.dim(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < u.dim(); ++k) m = std::max(m, std::abs(u[k] - v[k]));
    return m;
}

/// System 1 is the slow index: amp[i * v.dim() + j] = u_i v_j.
inline StateVector tensor_state(const StateVector& u, const StateVector& v) {
    std::vector<Complex> amp(u.dim() * v.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
        for (std::size_t j = 0; j < v.dim(); ++j) amp[i * v.dim() + j] = u[i] * v[j];
    }
    return StateVector::raw(std::move(amp));
}

// ---------------------------------------------------------------------------
// Operator
// ---------------------------------------------------------------------------

/// Square matrix, entries(row, col) = <row|A|col>, stored row-major.
class Operator {
  public:
    Operator(std::size_t dim, std::vector<Complex> row_major) : dim_(dim), m_(std::move(row_major)) {
        detail::require_dim(dim_);
        if (m_.size() != dim_ * dim_) {
            throw DimensionError("Operator: expected " + std::to_string(dim_ * dim_) + " entries");
        }
        detail::require_finite(m_, "Operator");
    }

    static Operator zero(std::size_t dim) { return Operator(dim, std::vector<Complex>(dim * dim)); }

    static Operator identity(std::size_t dim) {
        Operator id = zero(dim);
        for (std::size_t i = 0; i < dim; ++i) id.m_[i * dim + i] = 1.0;
        return id;
    }

    static Operator diagonal(std::span<const Complex> diag) {
        Operator d = zero(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) d.m_[i * diag.size() + i] = diag[i];
        return d;
    }

    static Operator from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        const std::size_t d = rows.size();
        std::vector<Complex> m;
        m.reserve(d * d);
        for (const auto& r : rows) {
            if (r.size() != d) throw DimensionError("Operator::from_rows: matrix not square");
            m.insert(m.end(), r.begin(), r.end());
        }
        return Operator(d, std::move(m));
    }

    std::size_t dim() const { return dim_; }
    const Complex& operator()(std::size_t row, std::size_t col) const { return m_[row * dim_ + col]; }
    std::span<const Complex> entries() const { return m_; }

    Operator adjoint() const {
        std::vector<Complex> m(m_.size());
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = 0; c < dim_; ++c) m[c * dim_ + r] = std::conj(m_[r * dim_ + c]);
        }
        return Operator(dim_, std::move(m));
    }

    Complex trace() const {
        Complex t{};
        for (std::size_t i = 0; i < dim_; ++i) t += m_[i * dim_ + i];
        return t;
    }

    friend Operator operator*(const Operator& a, const Operator& b) {
        detail::require_same_dim(a.dim_, b.dim_, "Operator *");
        const std::size_t d = a.dim_;
        std::vector<Complex> m(d * d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t k = 0; k < d; ++k) {
                const Complex ark = a.m_[r * d + k];
                if (ark == Complex{}) continue;
                for (std::size_t c = 0; c < d; ++c) m[r * d + c] += ark * b.m_[k * d + c];
            }
        }
        return Operator(d, std::move(m));
    }

    friend StateVector operator*(const Operator& a, const StateVector& v) {
        detail::require_same_dim(a.dim_, v.dim(), "Operator * StateVector");
        std::vector<Complex> out(a.dim_);
        for (std::size_t r = 0; r < a.dim_; ++r) {
            for (std::size_t c = 0; c < a.dim_; ++c) out[r] += a.m_[r * a.dim_ + c] * v[c];
        }
        return StateVector::raw(std::move(out));
    }

    friend Operator operator+(const Operator& a, const Operator& b) {
        detail::require_same_dim(a.dim_, b.dim_, "Operator +");
        auto m = a.m_;
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += b.m_[i];
        return Operator(a.dim_, std::move(m));
    }

    friend Operator operator-(const Operator& a, const Operator& b) {
        detail::require_same_dim(a.dim_, b.dim_, "Operator -");
        auto m = a.m_;
        for (std::size_t i = 0; i < m.size(); ++i) m[i] -= b.m_[i];
        return Operator(a.dim_, std::move(m));
    }

    friend Operator operator*(Complex s, const Operator& a) {
        auto m = a.m_;
        for (auto& z : m) z *= s;
        return Operator(a.dim_, std::move(m));
    }

  private:
    std::size_t dim_;
    std::vector<Complex> m_;
};

inline double max_abs_diff(const Operator& a, const Operator& b) {
    detail::require_same_dim(a.dim(), b.dim(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return m;
}

inline bool is_hermitian(const Operator& a, double tol = kTol) {
    return max_abs_diff(a, a.adjoint()) <= tol;
}

inline bool is_unitary(const Operator& u, double tol = kTol) {
    return max_abs_diff(u.adjoint() * u, Operator::identity(u.dim())) <= tol;
}

/// |u><v|
inline Operator outer(const StateVector& u, const StateVector& v) {
    detail::require_same_dim(u.dim(), v.dim(), "outer");
    const std::size_t d = u.dim();
    std::vector<Complex> m(d * d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) m[r * d + c] = u[r] * std::conj(v[c]);
    }
    return Operator(d, std::move(m));
}

inline Operator projector(const StateVector& v) {
    if (!v.is_normalized()) {
        throw std::invalid_argument("projector: state is not normalized");
    }
    return outer(v, v);
}

/// Kronecker product; same index convention as tensor_state.
inline Operator tensor_op(const Operator& a, const Operator& b) {
    const std::size_t da = a.dim();
    const std::size_t db = b.dim();
    const std::size_t d = da * db;
    detail::require_dim(d);
    std::vector<Complex> m(d * d);
    for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t j = 0; j < da; ++j) {
            for (std::size_t k = 0; k < db; ++k) {
                for (std::size_t l = 0; l < db; ++l) {
                    m[(i * db + k) * d + (j * db + l)] = a(i, j) * b(k, l);
                }
            }
        }
    }
    return Operator(d, std::move(m));
}

/// <a|A|a>
inline Complex expectation(const StateVector& a, const Operator& op) { return inner(a, op * a); }

/// Tr(ops[0] ops[1] ...), multiplied left to right. Order matters.
inline Complex product_trace(std::span<const Operator> ops) {
    if (ops.empty()) {
        throw std::invalid_argument("product_trace: empty operator list");
    }
    Operator acc = ops.front();
    for (std::size_t i = 1; i < ops.size(); ++i) acc = acc * ops[i];
    return acc.trace();
}

inline Complex product_trace(std::initializer_list<Operator> ops) {
    return product_trace(std::span<const Operator>(ops.begin(), ops.size()));
}

enum class Axis { X, Y, Z };

inline Operator pauli(Axis axis) {
    const Complex i{0.0, 1.0};
    switch (axis) {
        case Axis::X: return Operator::from_rows({{0.0, 1.0}, {1.0, 0.0}});
        case Axis::Y: return Operator::from_rows({{0.0, -i}, {i, 0.0}});
        case Axis::Z: return Operator::from_rows({{1.0, 0.0}, {0.0, -1.0}});
    }
    throw std::invalid_argument("pauli: unknown axis");
}

/// +1 eigenstate of cos(theta) Z + sin(theta)cos(phi) X + sin(theta)sin(phi) Y,
/// returned as (cos(theta/2), e^{i phi} sin(theta/2)).
inline StateVector bloch_state(double theta, double phi) {
    return StateVector::raw({std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2)});
}

// ---------------------------------------------------------------------------
// OrthonormalBasis
// ---------------------------------------------------------------------------

class OrthonormalBasis {
  public:
    OrthonormalBasis(std::vector<std::string> labels, std::vector<StateVector> vectors)
        : labels_(std::move(labels)), vectors_(std::move(vectors)) {
        if (vectors_.empty()) throw DimensionError("OrthonormalBasis: no vectors");
        const std::size_t d = vectors_.front().dim();
        if (vectors_.size() != d) {
            throw DimensionError("OrthonormalBasis: " + std::to_string(vectors_.size()) +
                                 " vectors for dimension " + std::to_string(d));
        }
        if (labels_.size() != d) throw DimensionError("OrthonormalBasis: label count mismatch");
        std::unordered_set<std::string> seen;
        for (const auto& l : labels_) {
            if (!seen.insert(l).second) {
                throw std::invalid_argument("OrthonormalBasis: duplicate label '" + l + "'");
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            detail::require_same_dim(vectors_[i].dim(), d, "OrthonormalBasis");
            for (std::size_t j = i; j < d; ++j) {
                const Complex g = inner(vectors_[i], vectors_[j]);
                const Complex want = (i == j) ? Complex{1.0} : Complex{};
                if (std::abs(g - want) > kTol) {
                    throw std::invalid_argument("OrthonormalBasis: vectors '" + labels_[i] + "' and '" +
                                                labels_[j] + "' are not orthonormal");
                }
            }
        }
    }

    std::size_t dim() const { return vectors_.size(); }
    const StateVector& operator[](std::size_t i) const { return vectors_[i]; }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<StateVector>& vectors() const { return vectors_; }

    std::size_t index_of(const std::string& label) const {
        const auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) throw std::out_of_range("OrthonormalBasis: no label '" + label + "'");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    /// Same rays in the same order (vectors may differ by unit phases).
    bool same_rays(const OrthonormalBasis& other, double tol = kTol) const {
        if (other.dim() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (std::abs(std::abs(inner(vectors_[i], other.vectors_[i])) - 1.0) > tol) return false;
        }
        return true;
    }

  private:
    std::vector<std::string> labels_;
    std::vector<StateVector> vectors_;
};

inline OrthonormalBasis standard_basis(std::size_t dim, std::vector<std::string> labels = {}) {
    detail::require_dim(dim);
    if (labels.empty()) {
        for (std::size_t i = 0; i < dim; ++i) labels.push_back(std::to_string(i));
    }
    std::vector<StateVector> v;
    for (std::size_t i = 0; i < dim; ++i) v.push_back(StateVector::basis(dim, i));
    return OrthonormalBasis(std::move(labels), std::move(v));
}

/// Extends orthonormal `seeds` to a full basis by Gram-Schmidt over the
/// standard basis vectors. Labels for the added vectors are caller-supplied.
inline OrthonormalBasis complete_basis(std::vector<StateVector> seeds, std::vector<std::string> labels) {
    if (seeds.empty()) throw std::invalid_argument("complete_basis: no seed vectors");
    const std::size_t d = seeds.front().dim();
    for (std::size_t k = 0; k < d && seeds.size() < d; ++k) {
        StateVector candidate = StateVector::basis(d, k);
        for (const auto& s : seeds) candidate = candidate - s.scaled(inner(s, candidate));
        // reorthogonalize once for round-off
        for (const auto& s : seeds) candidate = candidate - s.scaled(inner(s, candidate));
        if (candidate.norm() > 1e-6) seeds.push_back(StateVector::normalized(
            std::vector<Complex>(candidate.amplitudes().begin(), candidate.amplitudes().end())));
    }
    return OrthonormalBasis(std::move(labels), std::move(seeds));
}

/// Product basis, system 1 slow. Labels are "(l1,l2)".
inline OrthonormalBasis tensor_basis(const OrthonormalBasis& a, const OrthonormalBasis& b) {
    std::vector<std::string> labels;
    std::vector<StateVector> v;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            labels.push_back("(" + a.label(i) + "," + b.label(j) + ")");
            v.push_back(tensor_state(a[i], b[j]));
        }
    }
    return OrthonormalBasis(std::move(labels), std::move(v));
}

/// Eigenbasis {+1, -1} of a Pauli operator with labels "+1", "-1".
inline OrthonormalBasis pauli_basis(Axis axis) {
    const double h = 1.0 / std::sqrt(2.0);
    const Complex i{0.0, 1.0};
    switch (axis) {
        case Axis::X:
            return OrthonormalBasis({"+1", "-1"}, {StateVector::raw({h, h}), StateVector::raw({h, -h})});
        case Axis::Y:
            return OrthonormalBasis({"+1", "-1"},
                                    {StateVector::raw({h, h * i}), StateVector::raw({h, -h * i})});
        case Axis::Z:
            return OrthonormalBasis({"+1", "-1"}, {StateVector::basis(2, 0), StateVector::basis(2, 1)});
    }
    throw std::invalid_argument("pauli_basis: unknown axis");
}

}  // namespace kdqlab
