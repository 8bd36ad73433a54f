// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kdqlab/kdq.hpp"
#include "kdqlab/scenarios.hpp"
#include "kdqlab/weaksim.hpp"
#include "test_support.hpp"

using namespace kdqlab;
using kdqlab::testing::kd_oracle;
using kdqlab::testing::random_basis;
using kdqlab::testing::random_state;

namespace {

constexpr double kTol10 = 1e-10;
constexpr double kTol9 = 1e-9;

/// Collects failed conditions for one criterion.
class Verdict {
  public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream s;
        s.precision(15);
        s << what << ": got " << got << ", want " << want << " +- " << tol;
        expect(std::abs(got - want) <= tol, s.str());
    }
    void near(Complex got, Complex want, double tol, const std::string& what) {
        near(got.real(), want.real(), tol, what + " (re)");
        near(got.imag(), want.imag(), tol, what + " (im)");
    }
    bool ok() const { return failed_ == 0 && checks_ > 0; }
    std::size_t checks() const { return checks_; }
    std::size_t failed() const { return failed_; }
    const std::vector<std::string>& failures() const { return failures_; }

  private:
    std::size_t checks_ = 0;
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
};

void leggett_garg_criterion(Verdict& v) {
    // cos(theta) = 1/2
    v.near(leggett_garg_routes(std::acos(0.5)).kd_real, -0.125, kTol10, "P(-1,+1|a) at cos theta = 1/2");
    v.expect(leggett_garg(kPi / 3).passed(), "leggett_garg(pi/3) report");

    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, kPi);
    for (int t = 0; t < 50; ++t) {
        double theta = u(rng);
        if (theta == 0.0) theta = 1.0;
        const auto r = leggett_garg_routes(theta);
        const std::string at = " at theta=" + std::to_string(theta);
        v.near(r.from_expectations, r.closed_form, kTol10, "expectation route" + at);
        v.near(r.from_transformation, r.closed_form, kTol10, "transformation route" + at);
        v.near(r.kd_real, r.closed_form, kTol10, "KD entry" + at);
        v.near(r.kd_imag, 0.0, kTol10, "Im KD entry" + at);
        const bool negative = r.kd_real < -kTol10;
        const bool below = theta < kPi / 2;
        if (std::abs(theta - kPi / 2) > 1e-6) v.expect(negative == below, "negativity iff theta < pi/2" + at);
    }
    v.near(leggett_garg_routes(kPi / 2).kd_real, 0.0, kTol10, "P(-1,+1|a) at theta = pi/2");

    double best = 1.0, best_theta = 0.0;
    const int n = 100000;
    for (int i = 1; i < n; ++i) {
        const double theta = (kPi / 2) * i / n;
        const double val = kd_joint(bloch_state(0.0, 0.0), spin_basis_xz(theta), spin_basis_xz(2 * theta)).at(1, 0).real();
        if (val < best) {
            best = val;
            best_theta = theta;
        }
    }
    v.near(std::cos(best_theta), 0.5, 1e-4, "grid-search minimum location (cos theta)");
    v.near(best, -0.125, kTol9, "grid-search minimum value");
}

void three_box_criterion(Verdict& v) {
    const auto r = three_box();
    v.expect(r.passed(), "three_box report");
    v.near(r.kd.at(0, 0), Complex(1.0 / 9), kTol10, "P(1,b|a)");
    v.near(r.kd.at(1, 0), Complex(1.0 / 9), kTol10, "P(2,b|a)");
    v.near(r.kd.at(2, 0), Complex(-1.0 / 9), kTol10, "P(3,b|a)");
    v.near(postselection_probability(r.kd, 0), 1.0 / 9, kTol10, "P(b|a)");
    v.near(overlap_from_kd(r.kd, ActionSpectrum(r.kd.basis_m(), {0.0, 0.0, kPi}), 0), 1.0, kTol10,
           "overlap from KD with phases (0,0,pi)");
}

void cheshire_cat_criterion(Verdict& v) {
    const auto r = cheshire_cat();
    v.expect(r.passed(), "cheshire_cat report");
    const std::array<double, 4> want{0.125, 0.125, 0.125, -0.125};
    for (std::size_t m = 0; m < 4; ++m) v.near(r.kd.at(m, 0), Complex(want[m]), kTol10, "P(" + r.kd.basis_m().label(m) + ";b|a)");
    const double pb = postselection_probability(r.kd, 0);
    v.near((r.kd.at(2, 0) + r.kd.at(3, 0)).real() / pb, 0.0, kTol10, "conditional weight of path p2");
    v.near((r.kd.at(2, 0) - r.kd.at(3, 0)).real() / pb, 1.0, kTol10, "smile weight in p2");
}

void hardy_criterion(Verdict& v) {
    const auto r = hardy();
    v.expect(r.passed(), "hardy report");
    const auto& kd = r.kd;
    const auto& bm = kd.basis_m();
    const std::size_t bb = kd.basis_b().index_of("(b1,b2)");
    const std::size_t oo = bm.index_of("(O1,O2)"), oi = bm.index_of("(O1,I2)"), io = bm.index_of("(I1,O2)"),
                      ii = bm.index_of("(I1,I2)");
    const double pb = postselection_probability(kd, bb);
    v.near(pb, 1.0 / 12, kTol10, "P(b1,b2|a)");
    v.near(kd.at(oo, bb), Complex(-1.0 / 12), kTol10, "P(O1,O2;b1,b2|a)");
    v.near(kd.at(oi, bb), Complex(1.0 / 12), kTol10, "P(O1,I2;b1,b2|a)");
    v.near(kd.at(io, bb), Complex(1.0 / 12), kTol10, "P(I1,O2;b1,b2|a)");
    v.near(kd.at(ii, bb), Complex(0.0), kTol10, "P(I1,I2;b1,b2|a)");
    v.near(kd.at(oo, bb) + kd.at(oi, bb), Complex(0.0), kTol10, "zero marginal, particle 1 outer");
    v.near(kd.at(oo, bb) + kd.at(io, bb), Complex(0.0), kTol10, "zero marginal, particle 2 outer");
    const ActionSpectrum flip(bm, {0.0, kPi, kPi, 0.0});
    const double pu = overlap_direct(kd.state_a(), kd.basis_b()[bb], unitary_from_actions(flip));
    v.near(pu, 0.75, kTol10, "P(b|U(a)) direct");
    v.near(overlap_from_kd(kd, flip, bb), 0.75, kTol10, "P(b|U(a)) from KD");
    v.near((kd.at(oo, bb) - kd.at(oi, bb) - kd.at(io, bb) + kd.at(ii, bb)).real(), -std::sqrt(pb * pu), kTol10,
           "signed sum = -sqrt(P(b|a) P(b|U(a)))");
    v.near(-std::sqrt(pb * pu), -0.25, kTol10, "-1/4 relation");
}

void contextuality_criterion(Verdict& v) {
    const auto r = peres_mermin_swap();
    v.expect(r.passed(), "peres_mermin_swap report");
    const auto& kd = r.kd;
    const std::size_t bi = kd.basis_b().index_of("(+1,+1)");
    const std::array<double, 4> want{-0.125, 0.125, 0.125, 0.125};
    for (std::size_t m = 0; m < 4; ++m) v.near(kd.at(m, bi), Complex(want[m]), kTol10, "P(" + kd.basis_m().label(m) + ";b|a)");

    const Operator x = pauli(Axis::X), y = pauli(Axis::Y), z = pauli(Axis::Z);
    const Operator xx = tensor_op(x, x), yy = tensor_op(y, y), zz = tensor_op(z, z);
    const Operator xy = tensor_op(x, y), yx = tensor_op(y, x);
    for (std::size_t m = 0; m < 4; ++m) {
        const auto& s = kd.basis_m()[m];
        v.near((xx * (yy * s) + zz * s).norm(), 0.0, kTol10, "(X1X2)(Y1Y2) = -(Z1Z2) on " + kd.basis_m().label(m));
    }
    for (const StateVector* s : {&kd.state_a(), &kd.basis_b()[bi]}) {
        v.near((xy * (yx * *s) - zz * *s).norm(), 0.0, kTol10, "(X1Y2)(Y1X2) = (Z1Z2) on product context");
    }
}

void bell_criterion(Verdict& v) {
    for (double theta : {0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2}) {
        const auto r = bell_chsh(theta);
        const std::string at = " at theta=" + std::to_string(theta);
        v.expect(r.passed(), "bell report" + at);
        for (std::size_t m = 0; m < 4; ++m) {
            for (std::size_t b = 0; b < 4; ++b) {
                const Complex p = r.report.kd.at(m, b);
                v.near(p.real(), bell_table_entry(theta, m, b), kTol10, "table entry" + at);
                v.expect(std::abs(p.imag()) < kTol10, "imaginary part" + at);
            }
        }
        v.near(r.p_k_minus2, 0.5 * (1 - std::sin(theta) - std::cos(theta)), kTol10, "P(K=-2)" + at);
    }
    v.near(bell_chsh(kPi / 4).k_expectation, 2 * std::sqrt(2.0), kTol10, "<K> at pi/4");
}

void engine_criterion(Verdict& v) {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (std::size_t d : {2u, 3u, 4u}) {
        const std::string at = " (d=" + std::to_string(d) + ")";
        for (int t = 0; t < 1000; ++t) {
            const auto a = random_state(rng, d);
            const auto bm = random_basis(rng, d), bb = random_basis(rng, d);
            const auto kd = kd_joint(a, bm, bb);

            // marginals and normalization
            Complex total{};
            for (std::size_t m = 0; m < d; ++m) {
                Complex row{};
                for (std::size_t b = 0; b < d; ++b) {
                    row += kd.at(m, b);
                    if (t < 50) v.near(kd.at(m, b), kd_oracle(a, bm[m], bb[b]), kTol10, "KD vs contraction" + at);
                }
                v.near(row, Complex(std::norm(inner(bm[m], a))), kTol10, "row marginal" + at);
                total += row;
            }
            for (std::size_t b = 0; b < d; ++b) {
                v.near(Complex(postselection_probability(kd, b)), Complex(std::norm(inner(bb[b], a))), kTol10,
                       "column marginal" + at);
            }
            v.near(total, Complex(1.0), kTol10, "normalization" + at);

            // two overlap routes
            std::vector<double> phases(d);
            for (auto& p : phases) p = ph(rng);
            const ActionSpectrum spectrum(bm, phases);
            const Operator u = unitary_from_actions(spectrum);
            for (std::size_t b = 0; b < d; ++b) {
                if (postselection_probability(kd, b) <= kTol) continue;
                v.near(overlap_from_kd(kd, spectrum, b), overlap_direct(a, bb[b], u), kTol9, "overlap routes" + at);
            }

            // phase compensation
            const std::size_t b = t % d;
            const double pb = postselection_probability(kd, b);
            if (pb > 1e-6) {
                std::vector<double> best(d, 0.0);
                double abs_sum = 0.0;
                for (std::size_t m = 0; m < d; ++m) {
                    abs_sum += std::abs(kd.at(m, b));
                    if (std::abs(kd.at(m, b)) > kTol) best[m] = optimal_action(kd, m, b);
                }
                const double top = overlap_from_kd(kd, ActionSpectrum(bm, best), b);
                v.near(top, abs_sum * abs_sum / pb, kTol9, "optimal overlap" + at);
                v.expect(overlap_from_kd(kd, spectrum, b) <= top + kTol9, "random phases do not beat optimum" + at);
            }

            // sign/phase law
            for (std::size_t m = 0; m < d; ++m) {
                for (std::size_t bi = 0; bi < d; ++bi) {
                    const Complex p = kd.at(m, bi);
                    if (std::abs(p) <= kTol10) continue;
                    v.expect((p.real() < 0.0) == (std::abs(optimal_action(kd, m, bi)) > kPi / 2), "sign/phase law" + at);
                }
            }

            // reconstruction
            v.near(max_abs_diff(reconstruct_state(kd), projector(a)), 0.0, kTol9, "reconstruction" + at);
        }
    }
}

void weak_criterion(Verdict& v) {
    const auto r = three_box();
    const auto& a = r.kd.state_a();
    const auto& bm = r.kd.basis_m();
    const auto& bb = r.kd.basis_b();
    const double g = 1.0;
    const PointerConfig cfg{g, 50.0 * g, {0.0, 0.0, 1.0}};

    const double closed = conditional_pointer_mean(a, bm, bb, cfg, 0);
    v.near(closed, -g, 1e-3 * g, "box-3 conditional mean at s/g = 50");
    v.near(pointer_moments(a, bm, bb, cfg, 0).mean, closed, 1e-8, "closed form vs quadrature");

    const auto rows = weak_limit_sweep(a, bm, bb, cfg, 0, {50.0, 100.0, 200.0});
    v.expect(rows[0].error / rows[1].error >= 3.0 && rows[1].error / rows[2].error >= 3.0,
             "error falls >= 3x per halving of g/s");

    const auto batch = sample(a, bm, bb, cfg, 1000000, 42);
    const auto e = empirical_conditional_mean(batch, 0);
    const double se = e.stddev / std::sqrt(double(e.count));
    v.near(e.mean, closed, 4 * se, "Monte Carlo mean, 1e6 shots, seed 42");

    // strong limit: nondegenerate pointer so every box has its own peak
    const std::vector<double> kappa{-1.0, 0.0, 1.0};
    const PointerConfig strong{g, g / 100, kappa};
    for (std::size_t b = 0; b < 3; ++b) {
        const double pb = pointer_postselection_probability(a, bm, bb, strong, b);
        for (std::size_t m = 0; m < 3; ++m) {
            const double peak = g * kappa[m];
            const auto mom = pointer_moments(a, bm, bb, strong, b, peak - 4 * strong.width, peak + 4 * strong.width);
            const double want = std::norm(inner(bm[m], a)) * std::norm(inner(bb[b], bm[m]));
            v.near(mom.mass, want, 1e-3, "strong-limit peak mass");
            if (pb > 1e-6) v.near(mom.mass / pb, want / pb, 1e-2, "strong-limit conditional weight");
        }
    }

    // densities stay non-negative where the KD entry is negative
    double min_density = 0.0;
    for (double width : {g / 100, g, 50.0 * g}) {
        const PointerConfig c{g, width, {0.0, 0.0, 1.0}};
        for (int i = -4000; i <= 4000; ++i) {
            const double x = (2.0 * g + 8.0 * width) * i / 4000.0;
            for (std::size_t b = 0; b < 3; ++b) min_density = std::min(min_density, pointer_joint_density(a, bm, bb, c, x, b));
        }
    }
    v.expect(r.kd.at(2, 0).real() < 0.0 && min_density >= 0.0, "pointer densities non-negative");
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<void(Verdict&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Leggett-Garg joint probability and routes", 1.0, leggett_garg_criterion},
        {2, "three-box KD column and overlap", 1.0, three_box_criterion},
        {3, "Cheshire cat KD values and weights", 1.0, cheshire_cat_criterion},
        {4, "Hardy KD values, zero marginals, overlap 3/4", 1.0, hardy_criterion},
        {5, "contextuality KD values and operator relations", 1.0, contextuality_criterion},
        {6, "Bell/CHSH table, P(K=-2), <K>", 1.0, bell_criterion},
        {7, "engine identities (randomized, d = 2, 3, 4)", 30.0, engine_criterion},
        {8, "weak-measurement convergence", 60.0, weak_criterion},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(v);
        } catch (const std::exception& e) {
            v.expect(false, std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed < c.limit_seconds;
        const bool pass = v.ok() && in_time;
        if (!pass) ++failed;
        std::printf("%s  [%d] %s  (%zu checks, %.3f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    v.checks(), elapsed, c.limit_seconds);
        for (const auto& f : v.failures()) std::printf("        %s\n", f.c_str());
        if (v.failed() > v.failures().size()) std::printf("        ... %zu failures in total\n", v.failed());
        if (!in_time) std::printf("        runtime limit exceeded\n");
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
