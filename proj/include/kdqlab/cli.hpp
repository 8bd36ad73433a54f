// cli.hpp
// Scenario-file parsing, report rendering (table / json / csv) and the three
// kdqlab commands. Commands write data to `out`, diagnostics to `err`, and
// return the process exit code.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdqlab/kdq.hpp"
#include "kdqlab/qcore.hpp"
#include "kdqlab/scenarios.hpp"
#include "kdqlab/weaksim.hpp"

namespace kdqlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCheckFailed = 3;

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Format { Table, Json, Csv };

inline Format parse_format(const std::string& s) {
    if (s == "table") return Format::Table;
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    throw UsageError("unknown format '" + s + "' (expected table, json or csv)");
}

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// Magnitudes below this are printed as 0 so round-off noise does not leak
/// into golden output.
inline constexpr double kPrintFloor = 5e-15;

inline double chop(double x) { return std::abs(x) < kPrintFloor ? 0.0 : x; }

inline Complex chop(Complex z) { return {chop(z.real()), chop(z.imag())}; }

/// 12 significant digits.
inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", chop(x));
    return buf;
}

inline double rounded(double x) { return std::stod(fmt(x)); }

inline nlohmann::json json_pair(Complex z) { return nlohmann::json::array({rounded(z.real()), rounded(z.imag())}); }

/// Display phase of a table entry: undefined for vanishing modulus.
inline std::optional<double> display_phase(Complex z) {
    z = chop(z);
    if (std::abs(z) <= kTol) return std::nullopt;
    return wrap_phase(std::arg(z));
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

struct ScenarioFile {
    std::size_t dim = 0;
    StateVector state_a;
    OrthonormalBasis basis_m;
    OrthonormalBasis basis_b;
    std::optional<std::vector<double>> action_phase;
    std::optional<std::vector<double>> kappa;
    std::vector<std::string> warnings;
};

namespace detail {

inline Complex parse_complex(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(where + ": expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Complex> parse_vector(const nlohmann::json& j, std::size_t dim, const std::string& where) {
    if (!j.is_array() || j.size() != dim) {
        throw ParseError(where + ": expected " + std::to_string(dim) + " complex entries");
    }
    std::vector<Complex> v;
    for (std::size_t i = 0; i < dim; ++i) v.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline std::vector<double> parse_reals(const nlohmann::json& j, std::size_t dim, const std::string& where) {
    if (!j.is_array() || j.size() != dim) throw ParseError(where + ": expected " + std::to_string(dim) + " numbers");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw ParseError(where + ": expected numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline std::vector<std::string> parse_labels(const nlohmann::json& root, const char* key, std::size_t dim) {
    std::vector<std::string> labels;
    if (!root.contains(key)) {
        for (std::size_t i = 0; i < dim; ++i) labels.push_back(std::to_string(i));
        return labels;
    }
    const auto& j = root.at(key);
    if (!j.is_array() || j.size() != dim) throw ParseError(std::string(key) + ": expected " + std::to_string(dim) + " strings");
    for (const auto& s : j) {
        if (!s.is_string()) throw ParseError(std::string(key) + ": expected strings");
        labels.push_back(s.get<std::string>());
    }
    return labels;
}

inline OrthonormalBasis parse_basis(const nlohmann::json& root, const char* key, const char* label_key, std::size_t dim) {
    if (!root.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    const auto& rows = root.at(key);
    if (!rows.is_array() || rows.size() != dim) {
        throw ParseError(std::string(key) + ": expected " + std::to_string(dim) + " basis vectors");
    }
    std::vector<StateVector> vectors;
    for (std::size_t i = 0; i < dim; ++i) {
        vectors.push_back(StateVector::raw(parse_vector(rows[i], dim, std::string(key) + "[" + std::to_string(i) + "]")));
    }
    try {
        return OrthonormalBasis(parse_labels(root, label_key, dim), std::move(vectors));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string(key) + ": " + e.what());
    }
}

}  // namespace detail

inline ScenarioFile parse_scenario_file(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed scenario file: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("scenario file must be an object");
    static const std::vector<std::string> known{"dim",          "state_a",  "basis_m",  "basis_b",
                                                "action_phase", "labels_m", "labels_b", "kappa"};
    for (const auto& [key, _] : root.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ParseError("unknown key '" + key + "'");
        }
    }
    if (!root.contains("dim") || !root.at("dim").is_number_unsigned()) throw ParseError("'dim' must be a positive integer");
    const std::size_t dim = root.at("dim").get<std::size_t>();
    if (dim == 0 || dim > kMaxDim) throw ParseError("'dim' outside [1, " + std::to_string(kMaxDim) + "]");
    if (!root.contains("state_a")) throw ParseError("missing key 'state_a'");

    std::vector<std::string> warnings;
    auto amp = detail::parse_vector(root.at("state_a"), dim, "state_a");
    const double norm = StateVector::raw(amp).norm();
    if (norm < 1e-12) throw ParseError("state_a: zero vector");
    if (std::abs(norm - 1.0) > 1e-6) {
        warnings.push_back("state_a normalized (norm was " + fmt(norm) + ")");
    }

    ScenarioFile f{dim,
                   StateVector::normalized(std::move(amp)),
                   detail::parse_basis(root, "basis_m", "labels_m", dim),
                   detail::parse_basis(root, "basis_b", "labels_b", dim),
                   std::nullopt,
                   std::nullopt,
                   std::move(warnings)};
    if (root.contains("action_phase")) f.action_phase = detail::parse_reals(root.at("action_phase"), dim, "action_phase");
    if (root.contains("kappa")) f.kappa = detail::parse_reals(root.at("kappa"), dim, "kappa");
    return f;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_file(ss.str());
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline nlohmann::json kd_json(const KDDistribution& kd) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (std::size_t m = 0; m < kd.dim(); ++m) {
        nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
        for (std::size_t b = 0; b < kd.dim(); ++b) {
            rr.push_back(rounded(kd.at(m, b).real()));
            ir.push_back(rounded(kd.at(m, b).imag()));
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return {{"labels_m", kd.basis_m().labels()}, {"labels_b", kd.basis_b().labels()}, {"re", re}, {"im", im}};
}

/// Inverse of kd_json: labels and the complex table, row-major [m][b].
struct ParsedTable {
    std::vector<std::string> labels_m;
    std::vector<std::string> labels_b;
    std::vector<std::vector<Complex>> table;
};

inline ParsedTable parse_kd_json(const nlohmann::json& j) {
    ParsedTable t;
    t.labels_m = j.at("labels_m").get<std::vector<std::string>>();
    t.labels_b = j.at("labels_b").get<std::vector<std::string>>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    for (std::size_t m = 0; m < t.labels_m.size(); ++m) {
        std::vector<Complex> row;
        for (std::size_t b = 0; b < t.labels_b.size(); ++b) row.emplace_back(re[m][b].get<double>(), im[m][b].get<double>());
        t.table.push_back(std::move(row));
    }
    return t;
}

inline nlohmann::json marginals_json(const KDDistribution& kd) {
    const Marginals mg = marginals(kd);
    nlohmann::json pm = nlohmann::json::array(), pb = nlohmann::json::array();
    for (double p : mg.prob_m) pm.push_back(rounded(p));
    for (double p : mg.prob_b) pb.push_back(rounded(p));
    return {{"m", pm}, {"b", pb}};
}

inline nlohmann::json negativity_json(const NegativityReport& n) {
    return {{"total_negativity", rounded(n.total_negativity)},
            {"min_real", rounded(n.min_real)},
            {"argmin", {n.argmin.first, n.argmin.second}},
            {"max_abs_phase", rounded(n.max_abs_phase)}};
}

inline nlohmann::json check_json(const Check& c) {
    nlohmann::json j{{"name", c.name}, {"tolerance", c.tolerance}, {"pass", c.pass}};
    if (c.complex_valued) {
        j["expected"] = json_pair(c.expected);
        j["got"] = json_pair(c.got);
    } else {
        j["expected"] = rounded(c.expected.real());
        j["got"] = rounded(c.got.real());
    }
    return j;
}

inline void write_csv_cells(const KDDistribution& kd, std::ostream& out) {
    out << "m_label,b_label,re,im,modulus,phase\n";
    for (std::size_t m = 0; m < kd.dim(); ++m) {
        for (std::size_t b = 0; b < kd.dim(); ++b) {
            const Complex z = kd.at(m, b);
            const auto ph = display_phase(z);
            out << csv_field(kd.basis_m().label(m)) << ',' << csv_field(kd.basis_b().label(b)) << ',' << fmt(z.real())
                << ',' << fmt(z.imag()) << ',' << fmt(std::abs(z)) << ',' << (ph ? fmt(*ph) : "undefined") << '\n';
        }
    }
}

inline void write_table_cells(const KDDistribution& kd, std::ostream& out) {
    out << "P(m,b|a):\n";
    out << "  " << std::left << std::setw(12) << "m" << std::setw(12) << "b" << std::right << std::setw(20) << "re"
        << std::setw(20) << "im" << std::setw(20) << "modulus" << std::setw(20) << "phase" << '\n';
    for (std::size_t m = 0; m < kd.dim(); ++m) {
        for (std::size_t b = 0; b < kd.dim(); ++b) {
            const Complex z = kd.at(m, b);
            const auto ph = display_phase(z);
            out << "  " << std::left << std::setw(12) << kd.basis_m().label(m) << std::setw(12) << kd.basis_b().label(b)
                << std::right << std::setw(20) << fmt(z.real()) << std::setw(20) << fmt(z.imag()) << std::setw(20)
                << fmt(std::abs(z)) << std::setw(20) << (ph ? fmt(*ph) : "undefined") << '\n';
        }
    }
}

inline void write_table_summary(const KDDistribution& kd, const NegativityReport& neg, std::ostream& out) {
    const Marginals mg = marginals(kd);
    out << "P(m|a):";
    for (std::size_t m = 0; m < kd.dim(); ++m) out << "  " << kd.basis_m().label(m) << '=' << fmt(mg.prob_m[m]);
    out << "\nP(b|a):";
    for (std::size_t b = 0; b < kd.dim(); ++b) out << "  " << kd.basis_b().label(b) << '=' << fmt(mg.prob_b[b]);
    out << "\nnegativity: total=" << fmt(neg.total_negativity) << "  min_real=" << fmt(neg.min_real) << " at ("
        << neg.argmin.first << "; " << neg.argmin.second << ")  max_abs_phase=" << fmt(neg.max_abs_phase) << '\n';
}

inline std::string check_value(const Check& c, Complex z) {
    if (!c.complex_valued) return fmt(z.real());
    return "[" + fmt(z.real()) + ", " + fmt(z.imag()) + "]";
}

inline nlohmann::json scenario_json(const ScenarioReport& r) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.parameters) params[k] = rounded(v);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    nlohmann::json j{{"scenario", r.scenario},
                     {"dim", r.dim},
                     {"parameters", params},
                     {"kd", kd_json(r.kd)},
                     {"marginals", marginals_json(r.kd)},
                     {"negativity", negativity_json(r.negativity)},
                     {"checks", checks},
                     {"pass", r.passed()}};
    j["violated_inequality"] = r.violated_inequality ? nlohmann::json(*r.violated_inequality) : nlohmann::json(nullptr);
    return j;
}

inline void render_scenario(const ScenarioReport& r, Format format, std::ostream& out,
                            const nlohmann::json& extra = nlohmann::json::object()) {
    switch (format) {
        case Format::Json: {
            nlohmann::json j = scenario_json(r);
            for (const auto& [k, v] : extra.items()) j[k] = v;
            out << j.dump(2) << '\n';
            return;
        }
        case Format::Csv:
            write_csv_cells(r.kd, out);
            return;
        case Format::Table:
            break;
    }
    out << "scenario: " << r.scenario << "  (dim " << r.dim << ")\n";
    for (const auto& [k, v] : r.parameters) out << k << " = " << fmt(v) << '\n';
    write_table_cells(r.kd, out);
    write_table_summary(r.kd, r.negativity, out);
    for (const auto& [k, v] : extra.items()) {
        out << k << ": " << (v.is_number() ? fmt(v.get<double>()) : v.dump()) << '\n';
    }
    out << "checks:\n";
    for (const auto& c : r.checks) {
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": expected " << check_value(c, c.expected)
            << ", got " << check_value(c, c.got) << '\n';
    }
    if (r.violated_inequality) out << "violated: " << *r.violated_inequality << '\n';
    out << "result: " << (r.passed() ? "PASS" : "FAIL") << '\n';
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct ScenarioOptions {
    std::optional<double> theta;
    bool degrees = false;
    Format format = Format::Table;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"leggett-garg", "three-box", "cheshire-cat",
                                                "hardy",        "peres-mermin", "bell"};
    return names;
}

inline int run_scenario(const std::string& name, const ScenarioOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const bool takes_theta = (name == "leggett-garg" || name == "bell");
        if (std::find(scenario_names().begin(), scenario_names().end(), name) == scenario_names().end()) {
            throw UsageError("unknown scenario '" + name + "'");
        }
        if (opt.theta && !takes_theta) throw UsageError("scenario '" + name + "' takes no --theta");
        std::optional<double> theta = opt.theta;
        if (theta && opt.degrees) *theta *= kPi / 180.0;
        if (theta && !std::isfinite(*theta)) throw UsageError("--theta must be finite");

        if (name == "bell") {
            const BellReport br = bell_chsh(theta.value_or(kPi / 4));
            nlohmann::json errors = nlohmann::json::array();
            for (const auto& row : br.table_errors) {
                nlohmann::json jr = nlohmann::json::array();
                for (double e : row) jr.push_back(rounded(e));
                errors.push_back(jr);
            }
            nlohmann::json extra{{"k_expectation", rounded(br.k_expectation)},
                                 {"p_k_minus2", rounded(br.p_k_minus2)}};
            if (opt.format == Format::Json) extra["table_errors"] = errors;
            render_scenario(br.report, opt.format, out, extra);
            return br.passed() ? kExitOk : kExitCheckFailed;
        }
        ScenarioReport r = [&] {
            if (name == "leggett-garg") return leggett_garg(theta.value_or(kPi / 3));
            if (name == "three-box") return three_box();
            if (name == "cheshire-cat") return cheshire_cat();
            if (name == "hardy") return hardy();
            return peres_mermin_swap();
        }();
        render_scenario(r, opt.format, out);
        return r.passed() ? kExitOk : kExitCheckFailed;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

inline int run_kd(const std::string& path, Format format, std::ostream& out, std::ostream& err) {
    std::optional<ScenarioFile> loaded;
    try {
        loaded = load_scenario_file(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const ScenarioFile& f = *loaded;
    for (const auto& w : f.warnings) err << "warning: " << w << '\n';

    const KDDistribution kd = kd_joint(f.state_a, f.basis_m, f.basis_b);
    const NegativityReport neg = negativity(kd);

    struct OverlapRow {
        std::string label;
        double p_b;
        std::optional<double> from_kd;
        double direct;
    };
    std::vector<OverlapRow> overlaps;
    if (f.action_phase) {
        const ActionSpectrum spectrum(f.basis_m, *f.action_phase);
        const Operator u = unitary_from_actions(spectrum);
        const Marginals mg = marginals(kd);
        for (std::size_t b = 0; b < f.dim; ++b) {
            OverlapRow row{f.basis_b.label(b), mg.prob_b[b], std::nullopt, overlap_direct(f.state_a, f.basis_b[b], u)};
            try {
                row.from_kd = overlap_from_kd(kd, spectrum, b);
            } catch (const UndefinedError&) {
            }
            overlaps.push_back(row);
        }
    }

    switch (format) {
        case Format::Csv:
            write_csv_cells(kd, out);
            break;
        case Format::Json: {
            nlohmann::json j{{"dim", f.dim}, {"kd", kd_json(kd)}, {"marginals", marginals_json(kd)},
                             {"negativity", negativity_json(neg)}};
            if (f.action_phase) {
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& r : overlaps) {
                    nlohmann::json jr{{"b", r.label}, {"p_b", rounded(r.p_b)}, {"direct", rounded(r.direct)}};
                    jr["from_kd"] = r.from_kd ? nlohmann::json(rounded(*r.from_kd)) : nlohmann::json("undefined");
                    jr["difference"] =
                        r.from_kd ? nlohmann::json(rounded(*r.from_kd - r.direct)) : nlohmann::json("undefined");
                    rows.push_back(jr);
                }
                j["overlap"] = rows;
            }
            out << j.dump(2) << '\n';
            break;
        }
        case Format::Table:
            out << "dim " << f.dim << '\n';
            write_table_cells(kd, out);
            write_table_summary(kd, neg, out);
            if (f.action_phase) {
                out << "P(b|U(a)):\n";
                out << "  " << std::left << std::setw(12) << "b" << std::right << std::setw(20) << "P(b|a)"
                    << std::setw(20) << "from KD" << std::setw(20) << "direct" << std::setw(20) << "difference" << '\n';
                for (const auto& r : overlaps) {
                    out << "  " << std::left << std::setw(12) << r.label << std::right << std::setw(20) << fmt(r.p_b)
                        << std::setw(20) << (r.from_kd ? fmt(*r.from_kd) : "undefined") << std::setw(20)
                        << fmt(r.direct) << std::setw(20) << (r.from_kd ? fmt(*r.from_kd - r.direct) : "undefined")
                        << '\n';
                }
            }
            break;
    }
    return kExitOk;
}

struct WeakOptions {
    std::optional<std::vector<double>> kappa;
    double coupling = 1.0;
    double width = 50.0;
    std::size_t shots = 100000;
    std::uint64_t seed = 42;
    bool sweep = false;
    Format format = Format::Table;
    unsigned threads = 0;
};

inline const std::vector<double>& sweep_ratios() {
    static const std::vector<double> r{2, 4, 8, 16, 32, 64};
    return r;
}

inline std::vector<double> parse_kappa_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw UsageError("");
        } catch (const std::exception&) {
            throw UsageError("--kappa: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("--kappa: empty list");
    return out;
}

inline int run_weak(const std::string& path, const WeakOptions& opt, std::ostream& out, std::ostream& err) {
    std::optional<ScenarioFile> loaded;
    PointerConfig cfg;
    try {
        loaded = load_scenario_file(path);
        const ScenarioFile& f = *loaded;
        cfg.coupling = opt.coupling;
        cfg.width = opt.width;
        if (opt.kappa) {
            cfg.eigenvalue = *opt.kappa;
        } else if (f.kappa) {
            cfg.eigenvalue = *f.kappa;
        } else {
            throw UsageError("no pointer eigenvalues: pass --kappa or add 'kappa' to the scenario file");
        }
        cfg.validate(f.dim);
        if (opt.shots == 0) throw UsageError("--shots must be at least 1");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const ScenarioFile& f = *loaded;
    for (const auto& w : f.warnings) err << "warning: " << w << '\n';

    const SampleBatch batch = sample(f.state_a, f.basis_m, f.basis_b, cfg, opt.shots, opt.seed, opt.threads);
    const Operator observable = pointer_observable(f.basis_m, cfg.eigenvalue);

    struct Row {
        std::string label;
        double p_b = 0;
        bool defined = false;
        double closed = 0, quadrature = 0;
        std::optional<double> weak_re;  // undefined when <b|a> = 0 even if P(b) > 0
        EmpiricalMean empirical;
    };
    std::vector<Row> rows;
    for (std::size_t b = 0; b < f.dim; ++b) {
        Row r;
        r.label = f.basis_b.label(b);
        r.p_b = pointer_postselection_probability(f.state_a, f.basis_m, f.basis_b, cfg, b);
        r.empirical = empirical_conditional_mean(batch, b);
        if (r.p_b > kTol) {
            r.defined = true;
            r.closed = conditional_pointer_mean(f.state_a, f.basis_m, f.basis_b, cfg, b);
            r.quadrature = pointer_moments(f.state_a, f.basis_m, f.basis_b, cfg, b).mean;
            try {
                r.weak_re = weak_value(f.state_a, f.basis_b[b], observable).real();
            } catch (const UndefinedError&) {
            }
        }
        rows.push_back(r);
    }
    std::vector<std::vector<SweepRow>> sweeps(f.dim);
    if (opt.sweep) {
        for (std::size_t b = 0; b < f.dim; ++b) {
            if (rows[b].weak_re) sweeps[b] = weak_limit_sweep(f.state_a, f.basis_m, f.basis_b, cfg, b, sweep_ratios());
        }
    }

    const auto std_error = [](const EmpiricalMean& e) { return e.count > 1 ? e.stddev / std::sqrt(double(e.count)) : 0.0; };

    if (opt.format == Format::Json) {
        nlohmann::json jr = nlohmann::json::array();
        for (std::size_t b = 0; b < f.dim; ++b) {
            const Row& r = rows[b];
            nlohmann::json j{{"b", r.label}, {"p_b", rounded(r.p_b)}, {"count", r.empirical.count}};
            if (r.defined) {
                j["closed_form"] = rounded(r.closed);
                j["quadrature"] = rounded(r.quadrature);
            } else {
                j["closed_form"] = j["quadrature"] = "undefined";
            }
            j["weak_value_re"] = r.weak_re ? nlohmann::json(rounded(*r.weak_re)) : nlohmann::json("undefined");
            if (r.empirical.count > 0) {
                j["empirical"] = rounded(r.empirical.mean);
                j["std_error"] = rounded(std_error(r.empirical));
            } else {
                j["empirical"] = j["std_error"] = "undefined";
            }
            if (opt.sweep && r.weak_re) {
                nlohmann::json s = nlohmann::json::array();
                for (const auto& row : sweeps[b]) {
                    s.push_back({{"width_ratio", rounded(row.width_ratio)},
                                 {"scaled_mean", rounded(row.scaled_mean)},
                                 {"error", rounded(row.error)}});
                }
                j["sweep"] = s;
            }
            jr.push_back(j);
        }
        nlohmann::json top{{"coupling", rounded(cfg.coupling)}, {"width", rounded(cfg.width)},
                           {"shots", opt.shots},                {"seed", opt.seed},
                           {"kappa", cfg.eigenvalue},           {"rows", jr}};
        out << top.dump(2) << '\n';
        return kExitOk;
    }
    if (opt.format == Format::Csv) {
        out << "b_label,p_b,closed_form,quadrature,empirical,std_error,count,weak_value_re\n";
        for (const auto& r : rows) {
            const std::string u = "undefined";
            out << csv_field(r.label) << ',' << fmt(r.p_b) << ',' << (r.defined ? fmt(r.closed) : u) << ','
                << (r.defined ? fmt(r.quadrature) : u) << ',' << (r.empirical.count ? fmt(r.empirical.mean) : u) << ','
                << (r.empirical.count ? fmt(std_error(r.empirical)) : u) << ',' << r.empirical.count << ','
                << (r.weak_re ? fmt(*r.weak_re) : u) << '\n';
        }
        return kExitOk;
    }

    out << "pointer: g=" << fmt(cfg.coupling) << " s=" << fmt(cfg.width) << " shots=" << opt.shots
        << " seed=" << opt.seed << '\n';
    out << "  " << std::left << std::setw(12) << "b" << std::right << std::setw(20) << "P(b)" << std::setw(20)
        << "closed form" << std::setw(20) << "quadrature" << std::setw(20) << "empirical" << std::setw(20)
        << "std error" << std::setw(10) << "count" << std::setw(20) << "g Re(weak value)" << '\n';
    for (const auto& r : rows) {
        const std::string u = "undefined";
        out << "  " << std::left << std::setw(12) << r.label << std::right << std::setw(20) << fmt(r.p_b)
            << std::setw(20) << (r.defined ? fmt(r.closed) : u) << std::setw(20) << (r.defined ? fmt(r.quadrature) : u)
            << std::setw(20) << (r.empirical.count ? fmt(r.empirical.mean) : u) << std::setw(20)
            << (r.empirical.count ? fmt(std_error(r.empirical)) : u) << std::setw(10) << r.empirical.count
            << std::setw(20) << (r.weak_re ? fmt(cfg.coupling * *r.weak_re) : u) << '\n';
    }
    if (opt.sweep) {
        out << "weak-limit sweep (s = ratio * g):\n";
        out << "  " << std::left << std::setw(12) << "b" << std::right << std::setw(10) << "s/g" << std::setw(20)
            << "E[x|b]/g" << std::setw(20) << "Re(weak value)" << std::setw(20) << "|difference|" << '\n';
        for (std::size_t b = 0; b < f.dim; ++b) {
            if (!rows[b].weak_re) {
                out << "  " << std::left << std::setw(12) << rows[b].label << std::right << std::setw(10) << "-"
                    << std::setw(20) << "undefined" << '\n';
                continue;
            }
            for (const auto& s : sweeps[b]) {
                out << "  " << std::left << std::setw(12) << rows[b].label << std::right << std::setw(10)
                    << fmt(s.width_ratio) << std::setw(20) << fmt(s.scaled_mean) << std::setw(20)
                    << fmt(s.weak_value_re) << std::setw(20) << fmt(s.error) << '\n';
            }
        }
    }
    return kExitOk;
}

}  // namespace kdqlab::cli
