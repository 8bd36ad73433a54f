// weaksim.hpp
// Von Neumann pointer model for the intermediate measurement of M between a
// preparation a and a projective post-selection on B. The pointer starts as
// a zero-mean Gaussian of standard deviation s and is shifted by g * kappa_m.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <random>
#include <vector>

#include "kdqlab/kdq.hpp"
#include "kdqlab/qcore.hpp"

namespace kdqlab {

struct PointerConfig {
    double coupling = 1.0;           // g: pointer shift per unit eigenvalue
    double width = 1.0;              // s: initial pointer standard deviation
    std::vector<double> eigenvalue;  // kappa_m, one per m

    void validate(std::size_t dim) const {
        if (!(std::isfinite(coupling) && coupling > 0.0)) {
            throw std::invalid_argument("PointerConfig: coupling must be finite and positive");
        }
        if (!(std::isfinite(width) && width > 0.0)) {
            throw std::invalid_argument("PointerConfig: width must be finite and positive");
        }
        if (eigenvalue.size() != dim) {
            throw DimensionError("PointerConfig: " + std::to_string(eigenvalue.size()) +
                                 " eigenvalues for dimension " + std::to_string(dim));
        }
        for (double k : eigenvalue) {
            if (!std::isfinite(k)) throw std::invalid_argument("PointerConfig: non-finite eigenvalue");
        }
    }
};

struct SampleRecord {
    double pointer_reading = 0.0;
    std::size_t b_index = 0;
};

/// Records carry the b index; b_labels maps it to the basis label.
struct SampleBatch {
    std::uint64_t seed = 0;
    std::size_t shots = 0;
    std::vector<std::string> b_labels;
    std::vector<SampleRecord> records;

    const std::string& b_label(std::size_t record) const { return b_labels[records[record].b_index]; }
};

/// A = sum_m kappa_m |m><m|
inline Operator pointer_observable(const OrthonormalBasis& basis_m, const std::vector<double>& kappa) {
    detail::require_same_dim(basis_m.dim(), kappa.size(), "pointer_observable");
    Operator a = Operator::zero(basis_m.dim());
    for (std::size_t m = 0; m < basis_m.dim(); ++m) a = a + Complex{kappa[m]} * projector(basis_m[m]);
    return a;
}

namespace detail {

inline void check_pointer_inputs(const StateVector& a, const OrthonormalBasis& basis_m, const OrthonormalBasis& basis_b,
                                 const PointerConfig& cfg, std::size_t b_index) {
    require_same_dim(a.dim(), basis_m.dim(), "weaksim");
    require_same_dim(a.dim(), basis_b.dim(), "weaksim");
    cfg.validate(a.dim());
    if (b_index >= basis_b.dim()) throw std::out_of_range("weaksim: b index out of range");
}

/// c_m = <b|m><m|a>
inline std::vector<Complex> branch_amplitudes(const StateVector& a, const OrthonormalBasis& basis_m,
                                              const StateVector& b) {
    std::vector<Complex> c(basis_m.dim());
    for (std::size_t m = 0; m < basis_m.dim(); ++m) c[m] = inner(b, basis_m[m]) * inner(basis_m[m], a);
    return c;
}

/// Square root of the N(0, s^2) density.
inline double gaussian_amplitude(double x, double s) {
    return std::pow(2.0 * kPi * s * s, -0.25) * std::exp(-x * x / (4.0 * s * s));
}

inline double density_from_amplitudes(const std::vector<Complex>& c, const PointerConfig& cfg, double x) {
    Complex psi{};
    for (std::size_t m = 0; m < c.size(); ++m) {
        psi += c[m] * gaussian_amplitude(x - cfg.coupling * cfg.eigenvalue[m], cfg.width);
    }
    return std::norm(psi);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline double unit_uniform(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Joint density p(x, b) = |sum_m c_m G_s^{1/2}(x - g kappa_m)|^2.
inline double pointer_joint_density(const StateVector& a, const OrthonormalBasis& basis_m,
                                    const OrthonormalBasis& basis_b, const PointerConfig& cfg, double x,
                                    std::size_t b_index) {
    detail::check_pointer_inputs(a, basis_m, basis_b, cfg, b_index);
    return detail::density_from_amplitudes(detail::branch_amplitudes(a, basis_m, basis_b[b_index]), cfg, x);
}

struct PointerMoments {
    double mass = 0.0;  // integral of p(x,b) over the window
    double mean = 0.0;  // first moment divided by mass
};

/// Composite Simpson quadrature of p(x,b) and x p(x,b) over [lo, hi] with a
/// step no larger than s/32.
inline PointerMoments pointer_moments(const StateVector& a, const OrthonormalBasis& basis_m,
                                      const OrthonormalBasis& basis_b, const PointerConfig& cfg,
                                      std::size_t b_index, double lo, double hi) {
    detail::check_pointer_inputs(a, basis_m, basis_b, cfg, b_index);
    if (!(hi > lo)) throw std::invalid_argument("pointer_moments: empty window");
    const auto c = detail::branch_amplitudes(a, basis_m, basis_b[b_index]);
    std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / (cfg.width / 32.0)));
    n = std::clamp<std::size_t>(n + (n % 2), 64, std::size_t{1} << 24);
    const double h = (hi - lo) / double(n);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = lo + h * double(i);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double p = detail::density_from_amplitudes(c, cfg, x);
        m0 += w * p;
        m1 += w * x * p;
    }
    m0 *= h / 3.0;
    m1 *= h / 3.0;
    return {m0, m0 > 0.0 ? m1 / m0 : std::numeric_limits<double>::quiet_NaN()};
}

/// Quadrature over all peaks with 12 s margins.
inline PointerMoments pointer_moments(const StateVector& a, const OrthonormalBasis& basis_m,
                                      const OrthonormalBasis& basis_b, const PointerConfig& cfg,
                                      std::size_t b_index) {
    cfg.validate(basis_m.dim());
    const auto [lo_k, hi_k] = std::minmax_element(cfg.eigenvalue.begin(), cfg.eigenvalue.end());
    return pointer_moments(a, basis_m, basis_b, cfg, b_index, cfg.coupling * *lo_k - 12.0 * cfg.width,
                           cfg.coupling * *hi_k + 12.0 * cfg.width);
}

/// Exact P(b) under the pointer coupling (Gaussian overlaps in closed form).
inline double pointer_postselection_probability(const StateVector& a, const OrthonormalBasis& basis_m,
                                                const OrthonormalBasis& basis_b, const PointerConfig& cfg,
                                                std::size_t b_index) {
    detail::check_pointer_inputs(a, basis_m, basis_b, cfg, b_index);
    const auto c = detail::branch_amplitudes(a, basis_m, basis_b[b_index]);
    const double q = cfg.coupling * cfg.coupling / (8.0 * cfg.width * cfg.width);
    Complex mass{};
    for (std::size_t m = 0; m < c.size(); ++m) {
        for (std::size_t n = 0; n < c.size(); ++n) {
            const double dk = cfg.eigenvalue[m] - cfg.eigenvalue[n];
            mass += std::conj(c[m]) * c[n] * std::exp(-q * dk * dk);
        }
    }
    return mass.real();
}

/// E[x | b] from Gaussian overlap integrals.
inline double conditional_pointer_mean(const StateVector& a, const OrthonormalBasis& basis_m,
                                       const OrthonormalBasis& basis_b, const PointerConfig& cfg,
                                       std::size_t b_index) {
    detail::check_pointer_inputs(a, basis_m, basis_b, cfg, b_index);
    const auto c = detail::branch_amplitudes(a, basis_m, basis_b[b_index]);
    const double q = cfg.coupling * cfg.coupling / (8.0 * cfg.width * cfg.width);
    Complex num{}, den{};
    for (std::size_t m = 0; m < c.size(); ++m) {
        for (std::size_t n = 0; n < c.size(); ++n) {
            const double dk = cfg.eigenvalue[m] - cfg.eigenvalue[n];
            const Complex w = std::conj(c[m]) * c[n] * std::exp(-q * dk * dk);
            den += w;
            num += w * 0.5 * (cfg.eigenvalue[m] + cfg.eigenvalue[n]);
        }
    }
    if (den.real() <= kTol) {
        throw UndefinedError("conditional_pointer_mean: post-selection probability vanishes for b = '" +
                             basis_b.label(b_index) + "'");
    }
    return cfg.coupling * num.real() / den.real();
}

inline constexpr std::size_t kSampleGridPoints = std::size_t{1} << 14;
inline constexpr std::size_t kSampleChunk = 65536;

/// Draws (x, b) pairs by inverse-CDF lookup on a tabulated grid. Shots are cut
/// into chunks of kSampleChunk; chunk k uses its own generator seeded from
/// (seed, k), so the batch is a pure function of the inputs for any thread
/// count. `threads == 0` picks the hardware concurrency.
inline SampleBatch sample(const StateVector& a, const OrthonormalBasis& basis_m, const OrthonormalBasis& basis_b,
                          const PointerConfig& cfg, std::size_t shots, std::uint64_t seed, unsigned threads = 0) {
    if (shots == 0) throw std::invalid_argument("sample: shots must be at least 1");
    detail::check_pointer_inputs(a, basis_m, basis_b, cfg, 0);

    const std::size_t d = basis_b.dim();
    const std::size_t n = kSampleGridPoints;
    double kmax = 0.0;
    for (double k : cfg.eigenvalue) kmax = std::max(kmax, std::abs(cfg.coupling * k));
    const double half = kmax + 8.0 * cfg.width;
    const double dx = 2.0 * half / double(n - 1);

    // cdf[b][i]: trapezoid integral of p(x,b) from -half to x_i
    std::vector<std::vector<double>> cdf(d, std::vector<double>(n, 0.0));
    std::vector<double> b_cdf(d, 0.0);
    double total = 0.0;
    for (std::size_t b = 0; b < d; ++b) {
        const auto c = detail::branch_amplitudes(a, basis_m, basis_b[b]);
        double prev = detail::density_from_amplitudes(c, cfg, -half);
        for (std::size_t i = 1; i < n; ++i) {
            const double p = detail::density_from_amplitudes(c, cfg, -half + dx * double(i));
            cdf[b][i] = cdf[b][i - 1] + 0.5 * dx * (prev + p);
            prev = p;
        }
        total += cdf[b].back();
        b_cdf[b] = total;
    }

    SampleBatch batch{seed, shots, basis_b.labels(), std::vector<SampleRecord>(shots)};
    const std::size_t chunks = (shots + kSampleChunk - 1) / kSampleChunk;

    auto run_chunk = [&](std::size_t k) {
        std::mt19937_64 gen(detail::splitmix64(seed ^ detail::splitmix64(k)));
        const std::size_t begin = k * kSampleChunk;
        const std::size_t end = std::min(shots, begin + kSampleChunk);
        for (std::size_t s = begin; s < end; ++s) {
            const double ub = detail::unit_uniform(gen) * total;
            std::size_t b = static_cast<std::size_t>(std::upper_bound(b_cdf.begin(), b_cdf.end(), ub) - b_cdf.begin());
            b = std::min(b, d - 1);

            const auto& col = cdf[b];
            const double t = detail::unit_uniform(gen) * col.back();
            std::size_t i = static_cast<std::size_t>(std::upper_bound(col.begin(), col.end(), t) - col.begin());
            i = std::clamp<std::size_t>(i, 1, n - 1);
            const double lo = col[i - 1], hi = col[i];
            const double frac = hi > lo ? (t - lo) / (hi - lo) : 0.5;
            batch.records[s] = {-half + dx * (double(i - 1) + frac), b};
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
    if (threads <= 1) {
        for (std::size_t k = 0; k < chunks; ++k) run_chunk(k);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t k = t; k < chunks; k += threads) run_chunk(k);
            });
        }
    }
    return batch;
}

struct EmpiricalMean {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation
};

inline EmpiricalMean empirical_conditional_mean(const SampleBatch& batch, std::size_t b_index) {
    EmpiricalMean e;
    double sum = 0.0;
    for (const auto& r : batch.records) {
        if (r.b_index != b_index) continue;
        ++e.count;
        sum += r.pointer_reading;
    }
    if (e.count == 0) return e;
    e.mean = sum / double(e.count);
    double ss = 0.0;
    for (const auto& r : batch.records) {
        if (r.b_index == b_index) ss += (r.pointer_reading - e.mean) * (r.pointer_reading - e.mean);
    }
    e.stddev = e.count > 1 ? std::sqrt(ss / double(e.count - 1)) : 0.0;
    return e;
}

struct SweepRow {
    double width_ratio = 0.0;  // s / g
    double scaled_mean = 0.0;  // E[x|b] / g
    double weak_value_re = 0.0;
    double error = 0.0;        // |scaled_mean - Re weak value|
};

/// Conditional pointer means at s = ratio * g for each ratio, compared with
/// the real part of the weak value of sum_m kappa_m |m><m|.
inline std::vector<SweepRow> weak_limit_sweep(const StateVector& a, const OrthonormalBasis& basis_m,
                                              const OrthonormalBasis& basis_b, const PointerConfig& cfg,
                                              std::size_t b_index, const std::vector<double>& ratios) {
    const double wv = weak_value(a, basis_b[b_index], pointer_observable(basis_m, cfg.eigenvalue)).real();
    std::vector<SweepRow> rows;
    for (double ratio : ratios) {
        PointerConfig c = cfg;
        c.width = ratio * cfg.coupling;
        const double mean = conditional_pointer_mean(a, basis_m, basis_b, c, b_index) / cfg.coupling;
        rows.push_back({ratio, mean, wv, std::abs(mean - wv)});
    }
    return rows;
}

}  // namespace kdqlab
