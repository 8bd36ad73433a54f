// scenarios.hpp
// Executable paradox builders. Each builder sets up (a, M, B), runs the KD
// engine and records checks against the published values.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kdqlab/kdq.hpp"
#include "kdqlab/qcore.hpp"

namespace kdqlab {

/// Comparison of an engine value against a reference. Passes iff the real
/// and imaginary differences are both within tolerance.
struct Check {
    std::string name;
    Complex expected;
    Complex got;
    double tolerance = kTol;
    bool pass = false;
    bool complex_valued = false;
};

inline Check make_check(std::string name, Complex expected, Complex got, double tol = kTol) {
    const bool pass = std::abs(expected.real() - got.real()) <= tol && std::abs(expected.imag() - got.imag()) <= tol;
    return {std::move(name), expected, got, tol, pass, true};
}

inline Check make_check(std::string name, double expected, double got, double tol = kTol) {
    Check c = make_check(std::move(name), Complex{expected}, Complex{got}, tol);
    c.complex_valued = false;
    return c;
}

struct ScenarioReport {
    std::string scenario;
    std::size_t dim = 0;
    KDDistribution kd;
    NegativityReport negativity;
    std::vector<Check> checks;
    std::optional<std::string> violated_inequality;
    std::vector<std::pair<std::string, double>> parameters;

    bool passed() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return !checks.empty();
    }
};

/// Entries with modulus > kTol whose sign disagrees with their phase
/// (Re < 0 must coincide with |Arg| > pi/2).
inline int sign_phase_violations(const KDDistribution& kd) {
    int bad = 0;
    for (std::size_t m = 0; m < kd.dim(); ++m) {
        for (std::size_t b = 0; b < kd.dim(); ++b) {
            const Complex p = kd.at(m, b);
            if (std::abs(p) <= kTol) continue;
            const bool negative = p.real() < 0.0;
            const bool wide = std::abs(optimal_action(kd, m, b)) > kPi / 2;
            if (negative != wide) ++bad;
        }
    }
    return bad;
}

namespace detail {

inline ScenarioReport make_report(std::string name, KDDistribution kd) {
    const std::size_t d = kd.dim();
    NegativityReport neg = negativity(kd);
    return ScenarioReport{std::move(name), d, std::move(kd), neg, {}, std::nullopt, {}};
}

inline void add_common_checks(ScenarioReport& r, const ActionSpectrum& flip) {
    r.checks.push_back(make_check("transformation is half-periodic", 1.0, is_half_periodic(flip) ? 1.0 : 0.0));
    const Operator u = unitary_from_actions(flip);
    const Operator u2 = u * u;
    const Complex g = u2(0, 0);
    r.checks.push_back(make_check("U^2 proportional to identity", 0.0, max_abs_diff(u2, g * Operator::identity(u.dim()))));
    r.checks.push_back(make_check("sign/phase law violations", 0.0, double(sign_phase_violations(r.kd))));
}

inline Complex column_sum(const KDDistribution& kd, std::size_t b, std::initializer_list<std::size_t> ms) {
    Complex s{};
    for (auto m : ms) s += kd.at(m, b);
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Leggett-Garg
// ---------------------------------------------------------------------------

/// P(sigma_m=-1, sigma_b=+1 | sigma_a=+1) for coplanar spins a at 0, m at
/// theta, b at 2 theta, evaluated along independent routes.
struct LeggettGargRoutes {
    double kd_real = 0.0;           // Re of the KD entry
    double kd_imag = 0.0;
    double from_expectations = 0.0; // 1/4 (1 + <sb> - <sm> - <sm sb>)
    double closed_form = 0.0;       // 1/2 cos(theta) (cos(theta) - 1)
    double from_transformation = 0.0; // 1/2 (P(b|a) - D), D signed flip amplitude
    double p_b = 0.0;               // P(sigma_b=+1 | sigma_a=+1)
    double p_b_after_flip = 0.0;    // P(sigma_b=+1 | U(sigma_a=+1))
    double flip_difference = 0.0;   // D = P(+1,b|a) - P(-1,b|a) via <a|b><b|U|a>
};

inline void require_leggett_garg_angle(double theta) {
    if (!(theta > 0.0 && theta < kPi)) {
        throw std::invalid_argument("leggett_garg: theta must lie in (0, pi)");
    }
}

inline OrthonormalBasis spin_basis_xz(double angle) {
    return OrthonormalBasis({"+1", "-1"}, {bloch_state(angle, 0.0), bloch_state(angle + kPi, 0.0)});
}

inline Operator spin_xz(double angle) {
    return std::cos(angle) * pauli(Axis::Z) + std::sin(angle) * pauli(Axis::X);
}

inline LeggettGargRoutes leggett_garg_routes(double theta) {
    require_leggett_garg_angle(theta);
    const StateVector a = bloch_state(0.0, 0.0);
    const OrthonormalBasis basis_m = spin_basis_xz(theta);
    const OrthonormalBasis basis_b = spin_basis_xz(2.0 * theta);
    const KDDistribution kd = kd_joint(a, basis_m, basis_b);

    LeggettGargRoutes r;
    r.kd_real = kd.at(1, 0).real();
    r.kd_imag = kd.at(1, 0).imag();

    const Operator sm = spin_xz(theta);
    const Operator sb = spin_xz(2.0 * theta);
    r.from_expectations =
        0.25 * (1.0 + expectation(a, sb).real() - expectation(a, sm).real() - expectation(a, sm * sb).real());

    const double c = std::cos(theta);
    r.closed_form = 0.5 * c * (c - 1.0);

    const StateVector& b = basis_b[0];
    const Operator flip = unitary_from_actions(ActionSpectrum(basis_m, {0.0, kPi}));
    r.p_b = std::norm(inner(b, a));
    r.p_b_after_flip = overlap_direct(a, b, flip);
    r.flip_difference = (inner(a, b) * inner(b, flip * a)).real();
    r.from_transformation = 0.5 * (r.p_b - r.flip_difference);
    return r;
}

inline ScenarioReport leggett_garg(double theta) {
    require_leggett_garg_angle(theta);
    const StateVector a = bloch_state(0.0, 0.0);
    const OrthonormalBasis basis_m = spin_basis_xz(theta);
    const OrthonormalBasis basis_b = spin_basis_xz(2.0 * theta);
    const ActionSpectrum flip(basis_m, {0.0, kPi});
    ScenarioReport r = detail::make_report("leggett-garg", kd_joint(a, basis_m, basis_b));
    r.parameters.emplace_back("theta", theta);

    const LeggettGargRoutes routes = leggett_garg_routes(theta);
    r.checks.push_back(make_check("Re P(m=-1,b=+1|a) vs closed form", routes.closed_form, routes.kd_real));
    r.checks.push_back(make_check("Im P(m=-1,b=+1|a)", 0.0, routes.kd_imag));
    r.checks.push_back(make_check("expectation-value route", routes.closed_form, routes.from_expectations));
    r.checks.push_back(make_check("transformation route", routes.closed_form, routes.from_transformation));
    r.checks.push_back(make_check("P(b|U(a)) after m-axis flip", 1.0, routes.p_b_after_flip));
    r.checks.push_back(make_check("|P(+1,b|a) - P(-1,b|a)| = sqrt(P(b|a))", std::sqrt(routes.p_b),
                                  std::abs(routes.flip_difference)));
    if (routes.p_b > kTol) {
        r.checks.push_back(make_check("P(b|U(a)) from KD table", 1.0, overlap_from_kd(r.kd, flip, 0)));
    }
    detail::add_common_checks(r, flip);
    if (routes.kd_real < -kTol) {
        r.violated_inequality = "Leggett-Garg: P(sigma_m=-1, sigma_b=+1 | sigma_a=+1) < 0";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Three boxes
// ---------------------------------------------------------------------------

inline ScenarioReport three_box() {
    const double s = 1.0 / std::sqrt(3.0);
    const StateVector a = StateVector::raw({s, s, s});
    const StateVector b = StateVector::raw({s, s, -s});
    const OrthonormalBasis boxes = standard_basis(3, {"1", "2", "3"});
    // Completion chosen so that b' is orthogonal to a and b'' has positive
    // overlaps with every box; only the b column carries negativity.
    const double h = 1.0 / std::sqrt(2.0), t = 1.0 / std::sqrt(6.0);
    const OrthonormalBasis outputs({"b", "b'", "b''"},
                                   {b, StateVector::raw({h, -h, 0.0}), StateVector::raw({t, t, 2.0 * t})});
    const ActionSpectrum flip(boxes, {0.0, 0.0, kPi});

    ScenarioReport r = detail::make_report("three-box", kd_joint(a, boxes, outputs));
    const auto& kd = r.kd;
    r.checks.push_back(make_check("P(1,b|a)", Complex{1.0 / 9}, kd.at(0, 0)));
    r.checks.push_back(make_check("P(2,b|a)", Complex{1.0 / 9}, kd.at(1, 0)));
    r.checks.push_back(make_check("P(3,b|a)", Complex{-1.0 / 9}, kd.at(2, 0)));
    r.checks.push_back(make_check("P(b|a)", 1.0 / 9, marginals(kd).prob_b[0]));
    r.checks.push_back(make_check("P(b|U(a)) from KD, phases (0,0,pi)", 1.0, overlap_from_kd(kd, flip, 0)));
    r.checks.push_back(make_check("P(b|U(a)) direct", 1.0, overlap_direct(a, b, unitary_from_actions(flip))));
    r.checks.push_back(make_check("P(2,b|a) + P(3,b|a) cancels", Complex{0.0}, detail::column_sum(kd, 0, {1, 2})));
    r.checks.push_back(make_check("weak value of box 1", Complex{1.0}, weak_value(a, b, projector(boxes[0]))));
    r.checks.push_back(make_check("weak value of box 3", Complex{-1.0}, weak_value(a, b, projector(boxes[2]))));
    r.checks.push_back(make_check("optimal action of box 3", kPi, optimal_action(kd, 2, 0)));
    detail::add_common_checks(r, flip);
    if (r.negativity.min_real < -kTol) {
        r.violated_inequality = "three-box: P(3,b|a) < 0 while boxes 1 and 2 are each certain";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Cheshire cat
// ---------------------------------------------------------------------------

inline ScenarioReport cheshire_cat() {
    const OrthonormalBasis paths = standard_basis(4, {"p1,H", "p1,V", "p2,H", "p2,V"});
    const StateVector a = StateVector::raw({0.5, 0.5, 0.5, 0.5});
    const ActionSpectrum flip(paths, {0.0, 0.0, 0.0, kPi});
    const Operator u = unitary_from_actions(flip);

    // Post-selected port: the uniform detection state pulled back through the
    // (p2,V) phase shift. The rest of the basis is the part of a orthogonal to
    // b plus two vectors orthogonal to both, so only the b column goes negative.
    const StateVector b = u.adjoint() * a;
    const double r12 = 1.0 / std::sqrt(12.0), r2 = 1.0 / std::sqrt(2.0), r6 = 1.0 / std::sqrt(6.0);
    const OrthonormalBasis outputs({"b", "b'", "d1", "d2"},
                                   {b, StateVector::raw({r12, r12, r12, 3.0 * r12}), StateVector::raw({r2, -r2, 0.0, 0.0}),
                                    StateVector::raw({r6, r6, -2.0 * r6, 0.0})});

    ScenarioReport r = detail::make_report("cheshire-cat", kd_joint(a, paths, outputs));
    const auto& kd = r.kd;
    const double pb = marginals(kd).prob_b[0];
    r.checks.push_back(make_check("P(p1,H;b|a)", Complex{0.125}, kd.at(0, 0)));
    r.checks.push_back(make_check("P(p1,V;b|a)", Complex{0.125}, kd.at(1, 0)));
    r.checks.push_back(make_check("P(p2,H;b|a)", Complex{0.125}, kd.at(2, 0)));
    r.checks.push_back(make_check("P(p2,V;b|a)", Complex{-0.125}, kd.at(3, 0)));
    r.checks.push_back(make_check("P(b|a)", 0.25, pb));
    r.checks.push_back(make_check("conditional weight of path p1", 1.0, detail::column_sum(kd, 0, {0, 1}).real() / pb));
    r.checks.push_back(make_check("conditional weight of path p2", 0.0, detail::column_sum(kd, 0, {2, 3}).real() / pb));
    r.checks.push_back(make_check("conditional weight of H", 1.0, detail::column_sum(kd, 0, {0, 2}).real() / pb));
    r.checks.push_back(make_check("conditional weight of V", 0.0, detail::column_sum(kd, 0, {1, 3}).real() / pb));
    r.checks.push_back(make_check("smile P(H)-P(V) in p2", 1.0, (kd.at(2, 0) - kd.at(3, 0)).real() / pb));
    r.checks.push_back(make_check("smile P(H)-P(V) in p1", 0.0, (kd.at(0, 0) - kd.at(1, 0)).real() / pb));
    r.checks.push_back(make_check("P(b|U(a)) from KD, phase pi on (p2,V)", 1.0, overlap_from_kd(kd, flip, 0)));
    r.checks.push_back(make_check("P(b|U(a)) direct", 1.0, overlap_direct(a, b, u)));
    detail::add_common_checks(r, flip);
    if (r.negativity.min_real < -kTol) {
        r.violated_inequality = "Cheshire cat: P(p2,V;b|a) < 0 separates polarization from path";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Hardy
// ---------------------------------------------------------------------------

inline ScenarioReport hardy() {
    const double h = 1.0 / std::sqrt(2.0);
    const OrthonormalBasis path1 = standard_basis(2, {"O1", "I1"});
    const OrthonormalBasis path2 = standard_basis(2, {"O2", "I2"});
    // b_i = (|O_i> - |I_i>)/sqrt2 is the port opposite to the original output c_i.
    const OrthonormalBasis port1({"b1", "c1"}, {StateVector::raw({h, -h}), StateVector::raw({h, h})});
    const OrthonormalBasis port2({"b2", "c2"}, {StateVector::raw({h, -h}), StateVector::raw({h, h})});
    const OrthonormalBasis paths = tensor_basis(path1, path2);
    const OrthonormalBasis ports = tensor_basis(port1, port2);

    const double s = 1.0 / std::sqrt(3.0);
    const StateVector a = StateVector::raw({s, s, s, 0.0});
    const std::size_t oo = paths.index_of("(O1,O2)");
    const std::size_t oi = paths.index_of("(O1,I2)");
    const std::size_t io = paths.index_of("(I1,O2)");
    const std::size_t ii = paths.index_of("(I1,I2)");
    const std::size_t bb = ports.index_of("(b1,b2)");

    const ActionSpectrum flip(paths, {0.0, kPi, kPi, 2.0 * kPi});
    const Operator u = unitary_from_actions(flip);

    ScenarioReport r = detail::make_report("hardy", kd_joint(a, paths, ports));
    const auto& kd = r.kd;
    const double pb = marginals(kd).prob_b[bb];
    r.checks.push_back(make_check("P(b1,b2|a)", 1.0 / 12, pb));
    r.checks.push_back(make_check("P(O1,O2;b1,b2|a)", Complex{-1.0 / 12}, kd.at(oo, bb)));
    r.checks.push_back(make_check("P(O1,I2;b1,b2|a)", Complex{1.0 / 12}, kd.at(oi, bb)));
    r.checks.push_back(make_check("P(I1,O2;b1,b2|a)", Complex{1.0 / 12}, kd.at(io, bb)));
    r.checks.push_back(make_check("P(I1,I2;b1,b2|a)", Complex{0.0}, kd.at(ii, bb)));
    r.checks.push_back(make_check("P(O1,O2;bb) + P(O1,I2;bb) = 0", Complex{0.0}, detail::column_sum(kd, bb, {oo, oi})));
    r.checks.push_back(make_check("P(O1,O2;bb) + P(I1,O2;bb) = 0", Complex{0.0}, detail::column_sum(kd, bb, {oo, io})));

    const Operator rho = projector(a);
    const StateVector b1_o2 = tensor_state(port1[0], path2[0]);
    const StateVector o1_b2 = tensor_state(path1[0], port2[0]);
    r.checks.push_back(make_check("Born P(b1,O2|a)", 0.0, product_trace({projector(b1_o2), rho}).real()));
    r.checks.push_back(make_check("Born P(O1,b2|a)", 0.0, product_trace({projector(o1_b2), rho}).real()));

    const double p_flip = overlap_direct(a, ports[bb], u);
    r.checks.push_back(make_check("P(b1,b2|U(a)) direct", 0.75, p_flip));
    r.checks.push_back(make_check("P(b1,b2|U(a)) from KD", 0.75, overlap_from_kd(kd, flip, bb)));
    const Complex signed_sum = kd.at(oo, bb) - kd.at(oi, bb) - kd.at(io, bb) + kd.at(ii, bb);
    r.checks.push_back(make_check("P(OO) - P(OI) - P(IO) = -sqrt(P(bb|a) P(bb|U(a)))",
                                  Complex{-std::sqrt(pb * p_flip)}, signed_sum));
    r.checks.push_back(make_check("-sqrt(P(bb|a) P(bb|U(a)))", -0.25, -std::sqrt(pb * p_flip)));
    detail::add_common_checks(r, flip);
    if (r.negativity.min_real < -kTol) {
        r.violated_inequality = "Hardy: P(O1,O2;b1,b2|a) < 0 although both outer-path marginals vanish";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Swap contextuality (two-spin correlation products)
// ---------------------------------------------------------------------------

struct CorrelationLabel {
    const char* name;
    int xx;  // X1 X2 eigenvalue
    int yy;  // Y1 Y2 eigenvalue
};

inline constexpr std::array<CorrelationLabel, 4> kSwapEigenLabels{{
    {"S", -1, -1},
    {"T_x", -1, +1},
    {"T_y", +1, -1},
    {"T_z", +1, +1},
}};

inline OrthonormalBasis swap_eigenbasis() {
    const double h = 1.0 / std::sqrt(2.0);
    std::vector<StateVector> v{
        StateVector::raw({0.0, h, -h, 0.0}),  // S
        StateVector::raw({h, 0.0, 0.0, -h}),  // T_x
        StateVector::raw({h, 0.0, 0.0, h}),   // T_y
        StateVector::raw({0.0, h, h, 0.0}),   // T_z
    };
    std::vector<std::string> labels;
    for (const auto& l : kSwapEigenLabels) labels.emplace_back(l.name);
    return OrthonormalBasis(std::move(labels), std::move(v));
}

inline ScenarioReport peres_mermin_swap() {
    const Operator x = pauli(Axis::X), y = pauli(Axis::Y), z = pauli(Axis::Z);
    const Operator xx = tensor_op(x, x), yy = tensor_op(y, y), zz = tensor_op(z, z);
    const Operator xy = tensor_op(x, y), yx = tensor_op(y, x);

    const OrthonormalBasis xb = pauli_basis(Axis::X), yb = pauli_basis(Axis::Y);
    const StateVector a = tensor_state(xb[0], yb[0]);  // X1=+1, Y2=+1
    const OrthonormalBasis outputs = tensor_basis(yb, xb);
    const std::size_t bi = outputs.index_of("(+1,+1)");  // Y1=+1, X2=+1
    const StateVector& b = outputs[bi];
    const OrthonormalBasis contexts = swap_eigenbasis();
    const ActionSpectrum swap(contexts, {kPi, 0.0, 0.0, 0.0});

    ScenarioReport r = detail::make_report("peres-mermin", kd_joint(a, contexts, outputs));
    const auto& kd = r.kd;
    const std::array<double, 4> expected{-0.125, 0.125, 0.125, 0.125};
    for (std::size_t m = 0; m < 4; ++m) {
        r.checks.push_back(make_check("P(" + contexts.label(m) + ";b|a)", Complex{expected[m]}, kd.at(m, bi)));
    }

    for (std::size_t m = 0; m < 4; ++m) {
        const StateVector& v = contexts[m];
        const auto& lbl = kSwapEigenLabels[m];
        const double eig_res = std::max(max_abs_diff(xx * v, v.scaled(double(lbl.xx))),
                                        max_abs_diff(yy * v, v.scaled(double(lbl.yy))));
        r.checks.push_back(make_check("eigenvalues (X1X2, Y1Y2) of " + contexts.label(m), 0.0, eig_res));
        r.checks.push_back(
            make_check("(X1X2)(Y1Y2) = -(Z1Z2) on " + contexts.label(m), 0.0, (xx * (yy * v) + zz * v).norm()));
    }
    r.checks.push_back(make_check("(X1Y2)(Y1X2) = (Z1Z2) on a", 0.0, (xy * (yx * a) - zz * a).norm()));
    r.checks.push_back(make_check("(X1Y2)(Y1X2) = (Z1Z2) on b", 0.0, (xy * (yx * b) - zz * b).norm()));
    r.checks.push_back(make_check("X1Y2 = +1 on a", 0.0, max_abs_diff(xy * a, a)));
    r.checks.push_back(make_check("Y1X2 = +1 on b", 0.0, max_abs_diff(yx * b, b)));

    const double pb = marginals(kd).prob_b[bi];
    r.checks.push_back(make_check("P(b|a)", 0.25, pb));
    const auto conditional = [&](const Operator& op) {
        Complex s{};
        for (std::size_t m = 0; m < 4; ++m) s += expectation(contexts[m], op) * kd.at(m, bi);
        return s.real() / pb;
    };
    r.checks.push_back(make_check("conditional average of X1X2", 1.0, conditional(xx)));
    r.checks.push_back(make_check("conditional average of Y1Y2", 1.0, conditional(yy)));
    r.checks.push_back(make_check("conditional average of Z1Z2", 1.0, conditional(zz)));
    r.checks.push_back(make_check("P(S;b|a) + P(T_x;b|a) = 0", Complex{0.0}, detail::column_sum(kd, bi, {0, 1})));
    r.checks.push_back(make_check("P(b|U(a)) from KD, swap", 1.0, overlap_from_kd(kd, swap, bi)));
    r.checks.push_back(make_check("P(b|U(a)) direct, swap", 1.0, overlap_direct(a, b, unitary_from_actions(swap))));
    detail::add_common_checks(r, swap);
    if (r.negativity.min_real < -kTol) {
        r.violated_inequality = "contextuality: (X1X2)(Y1Y2) = (X1Y2)(Y1X2) fails; P(S;b|a) < 0";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Bell / CHSH
// ---------------------------------------------------------------------------

/// Local spin pairs in table order: (-1,-1), (+1,-1), (-1,+1), (+1,+1).
inline constexpr std::array<std::array<int, 2>, 4> kSpinPairs{{{-1, -1}, {+1, -1}, {-1, +1}, {+1, +1}}};

inline void require_bell_angle(double theta) {
    if (!(theta >= 0.0 && theta <= kPi / 2)) {
        throw std::invalid_argument("bell: theta must lie in [0, pi/2]");
    }
}

/// Product eigenbasis of (P1, P2) for a Pauli axis, labelled "(s1,s2)" in
/// kSpinPairs order.
inline OrthonormalBasis local_spin_basis(Axis axis) {
    const OrthonormalBasis single = pauli_basis(axis);  // index 0 = +1, 1 = -1
    std::vector<std::string> labels;
    std::vector<StateVector> v;
    for (const auto& s : kSpinPairs) {
        labels.push_back("(" + std::string(s[0] > 0 ? "+1" : "-1") + "," + std::string(s[1] > 0 ? "+1" : "-1") + ")");
        v.push_back(tensor_state(single[s[0] > 0 ? 0 : 1], single[s[1] > 0 ? 0 : 1]));
    }
    return OrthonormalBasis(std::move(labels), std::move(v));
}

/// Simultaneous +1 eigenstate of cos(t) X1Y2 + sin(t) X1X2 and
/// cos(t) Y1X2 - sin(t) Y1Y2.
inline StateVector bell_state(double theta) {
    require_bell_angle(theta);
    const Operator x = pauli(Axis::X), y = pauli(Axis::Y);
    const Operator id = Operator::identity(4);
    const Operator a1 = std::cos(theta) * tensor_op(x, y) + std::sin(theta) * tensor_op(x, x);
    const Operator a2 = std::cos(theta) * tensor_op(y, x) - std::sin(theta) * tensor_op(y, y);
    const Operator p = Complex{0.25} * ((id + a1) * (id + a2));

    if (std::abs(p.trace() - Complex{1.0}) > kTol) {
        throw InvariantError("bell_state: joint +1 eigenspace is not one-dimensional");
    }
    std::vector<StateVector> seeds{StateVector::raw({0.5, 0.5, 0.5, 0.5})};
    for (std::size_t k = 0; k < 4; ++k) seeds.push_back(StateVector::basis(4, k));
    for (const auto& seed : seeds) {
        const StateVector proj = p * seed;
        if (proj.norm() < 1e-6) continue;
        const StateVector a = StateVector::normalized({proj.amplitudes().begin(), proj.amplitudes().end()});
        if (max_abs_diff(a1 * a, a) > kTol || max_abs_diff(a2 * a, a) > kTol) {
            throw InvariantError("bell_state: projected state is not a joint +1 eigenstate");
        }
        return a;
    }
    throw InvariantError("bell_state: every seed vector projects to zero");
}

/// Reference joint probability for rows m = (X1,X2), columns b = (Y1,Y2), both in
/// kSpinPairs order.
inline double bell_table_entry(double theta, std::size_t m, std::size_t b) {
    enum Cell { C, NegC, OnePlusSin, OneMinusSin };
    static constexpr std::array<std::array<Cell, 4>, 4> table{{
        {C, OnePlusSin, OnePlusSin, NegC},
        {OneMinusSin, NegC, C, OneMinusSin},
        {OneMinusSin, C, NegC, OneMinusSin},
        {NegC, OnePlusSin, OnePlusSin, C},
    }};
    switch (table[m][b]) {
        case C: return std::cos(theta) / 8;
        case NegC: return -std::cos(theta) / 8;
        case OnePlusSin: return (1.0 + std::sin(theta)) / 8;
        case OneMinusSin: return (1.0 - std::sin(theta)) / 8;
    }
    return 0.0;
}

/// K = X1X2 + X1Y2 + Y1X2 - Y1Y2 for m = (X1,X2), b = (Y1,Y2).
inline int chsh_value(std::size_t m, std::size_t b) {
    const auto& x = kSpinPairs[m];
    const auto& y = kSpinPairs[b];
    return x[0] * x[1] + x[0] * y[1] + y[0] * x[1] - y[0] * y[1];
}

struct BellReport {
    double theta = 0.0;
    ScenarioReport report;
    double k_expectation = 0.0;
    double p_k_minus2 = 0.0;
    std::array<std::array<double, 4>, 4> table_errors{};

    bool passed() const { return report.passed(); }
};

inline BellReport bell_chsh(double theta) {
    require_bell_angle(theta);
    const StateVector a = bell_state(theta);
    const OrthonormalBasis basis_m = local_spin_basis(Axis::X);
    const OrthonormalBasis basis_b = local_spin_basis(Axis::Y);

    BellReport out{theta, detail::make_report("bell", kd_joint(a, basis_m, basis_b)), 0.0, 0.0, {}};
    ScenarioReport& r = out.report;
    const auto& kd = r.kd;
    r.parameters.emplace_back("theta", theta);

    double max_imag = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
        for (std::size_t b = 0; b < 4; ++b) {
            const Complex p = kd.at(m, b);
            const double want = bell_table_entry(theta, m, b);
            out.table_errors[m][b] = std::abs(p.real() - want);
            r.checks.push_back(make_check("Re P(" + basis_m.label(m) + ";" + basis_b.label(b) + "|a)", want, p.real()));
            max_imag = std::max(max_imag, std::abs(p.imag()));
            out.k_expectation += chsh_value(m, b) * p.real();
            if (chsh_value(m, b) == -2) out.p_k_minus2 += p.real();
        }
    }
    const double s = std::sin(theta), c = std::cos(theta);
    r.checks.push_back(make_check("max |Im P(m,b|a)|", 0.0, max_imag));
    r.checks.push_back(make_check("P(K=-2)", 0.5 * (1.0 - s - c), out.p_k_minus2));
    r.checks.push_back(make_check("<K> from KD", 2.0 * (s + c), out.k_expectation));

    const Operator x = pauli(Axis::X), y = pauli(Axis::Y);
    const Operator k_op = tensor_op(x, x) + tensor_op(x, y) + tensor_op(y, x) - tensor_op(y, y);
    r.checks.push_back(make_check("<K> direct", 2.0 * (s + c), expectation(a, k_op).real()));

    const bool bound_ok = std::abs(out.k_expectation) <= 2.0 + kTol;
    const bool positive = out.p_k_minus2 >= -kTol;
    r.checks.push_back(make_check("|<K>| <= 2 iff P(K=-2) >= 0", 1.0, bound_ok == positive ? 1.0 : 0.0));

    if (theta == 0.0) {
        const std::size_t bpp = basis_b.index_of("(+1,+1)");
        const std::array<std::pair<const char*, double>, 4> azero{{
            {"(+1,+1)", 0.125}, {"(+1,-1)", 0.125}, {"(-1,+1)", 0.125}, {"(-1,-1)", -0.125}}};
        for (const auto& [label, want] : azero) {
            r.checks.push_back(make_check(std::string("a(0): P(m=") + label + ";b=(+1,+1))", Complex{want},
                                          kd.at(basis_m.index_of(label), bpp)));
        }
    }

    // Controlled NOT diagonal in the (X1,X2) basis: phase pi on (-1,-1).
    const ActionSpectrum cnot(basis_m, {kPi, 0.0, 0.0, 0.0});
    detail::add_common_checks(r, cnot);
    if (out.p_k_minus2 < -kTol) {
        r.violated_inequality = "CHSH: |<K>| <= 2 violated, P(K=-2) < 0";
    }
    return out;
}

}  // namespace kdqlab
