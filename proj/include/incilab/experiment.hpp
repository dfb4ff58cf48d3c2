#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "incilab/energy.hpp"
#include "incilab/fit.hpp"
#include "incilab/homogeneity.hpp"
#include "incilab/incidence.hpp"
#include "incilab/point_set.hpp"
#include "incilab/regularity.hpp"

namespace incilab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Minimal "[section] key = value" parser; '#' and ';' start comments.
struct IniData {
    // section -> ordered key/value list (order preserved for canonical hashing)
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

    const std::string* find(const std::string& section, const std::string& key) const {
        for (const auto& [name, entries] : sections) {
            if (name != section) continue;
            for (const auto& [k, v] : entries)
                if (k == key) return &v;
        }
        return nullptr;
    }
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline IniData parse_ini(const std::string& text) {
    IniData ini;
    std::istringstream in(text);
    std::string line;
    std::string current = "";
    ini.sections.emplace_back("", std::vector<std::pair<std::string, std::string>>{});
    std::size_t cur_idx = 0;
    while (std::getline(in, line)) {
        std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config: malformed section header: " + line);
            current = trim(line.substr(1, line.size() - 2));
            ini.sections.emplace_back(current,
                                      std::vector<std::pair<std::string, std::string>>{});
            cur_idx = ini.sections.size() - 1;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key = value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key");
        ini.sections[cur_idx].second.emplace_back(key, value);
    }
    return ini;
}

inline double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: bad number for " + what + ": " + s);
    }
}

inline long long to_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: bad integer for " + what + ": " + s);
    }
}

inline std::vector<double> to_double_list(const std::string& s, const std::string& what) {
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(tok, what));
    if (out.empty()) throw ConfigError("config: empty list for " + what);
    return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

struct GeneratorSpec {
    std::string kind = "jittered";  // grid | jittered
    double amplitude = 0.25;
    std::uint64_t seed = 1;
};

struct FamilyConfig {
    std::string kind = "spheres";  // spheres | hyperplanes | dilated_ellipsoid
    std::string radius = "constant 0.25";
    std::vector<double> semiaxes;  // dilated_ellipsoid only
};

enum class EngineMode { brute, grid, both };

struct ExperimentConfig {
    int dimension = 2;
    double s = 1.6;
    std::vector<double> delta_coefficients{0.5};
    std::vector<std::uint64_t> n_list;
    EngineMode engine = EngineMode::grid;
    int workers = 1;
    double slack = 0.1;
    bool record_timing = false;
    std::string output;
    GeneratorSpec generator;
    FamilyConfig family;
    HomogeneityParams homogeneity{3.0, 0.4, 4};
    ScanMethod homogeneity_method = ScanMethod::automatic;
    std::size_t regularity_samples = 400;
    std::uint64_t regularity_seed = 2026;

    std::string canonical_string() const;
    std::uint64_t config_hash() const { return detail::fnv1a(canonical_string()); }
};

inline RadiusField parse_radius(const std::string& spec, int d) {
    std::istringstream in(spec);
    std::string kind;
    in >> kind;
    if (kind == "constant") {
        double r0;
        if (!(in >> r0)) throw ConfigError("config: radius constant needs a value");
        return constant_radius(r0);
    }
    if (kind == "affine") {
        double r0;
        if (!(in >> r0)) throw ConfigError("config: radius affine needs r0");
        Vec g(d);
        for (int i = 0; i < d; ++i)
            if (!(in >> g[i])) throw ConfigError("config: radius affine needs d slope entries");
        return affine_radius(r0, g);
    }
    throw ConfigError("config: unknown radius kind: " + kind);
}

inline SurfaceFamily build_family(const FamilyConfig& fc, int d) {
    if (fc.kind == "spheres") return make_variable_radius_spheres(parse_radius(fc.radius, d), d);
    if (fc.kind == "hyperplanes") return make_hyperplane_family(d);
    if (fc.kind == "dilated_ellipsoid") {
        if (fc.semiaxes.size() != static_cast<std::size_t>(d))
            throw ConfigError("config: dilated_ellipsoid needs d semiaxes");
        return make_dilated_body(ConvexBodySpec(fc.semiaxes), parse_radius(fc.radius, d), d);
    }
    throw ConfigError("config: unknown family kind: " + fc.kind);
}

inline std::string ExperimentConfig::canonical_string() const {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    os << "dimension=" << dimension << ";s=" << num(s) << ";coeffs=";
    for (double c : delta_coefficients) os << num(c) << ",";
    os << ";n_list=";
    for (auto n : n_list) os << n << ",";
    os << ";engine=" << static_cast<int>(engine) << ";slack=" << num(slack)
       << ";generator=" << generator.kind << "," << num(generator.amplitude) << ","
       << generator.seed << ";family=" << family.kind << "," << family.radius << ",";
    for (double a : family.semiaxes) os << num(a) << ",";
    os << ";homogeneity=" << num(homogeneity.C0) << "," << num(homogeneity.c0) << ","
       << homogeneity.k0;
    os << ";regularity=" << regularity_samples << "," << regularity_seed
       << ";timing=" << (record_timing ? 1 : 0);
    return os.str();
}

inline ExperimentConfig parse_config(const std::string& text) {
    detail::IniData ini = detail::parse_ini(text);
    ExperimentConfig cfg;
    auto get = [&](const char* sec, const char* key) { return ini.find(sec, key); };

    if (auto* v = get("experiment", "dimension"))
        cfg.dimension = static_cast<int>(detail::to_int(*v, "dimension"));
    if (cfg.dimension < 2 || cfg.dimension > kMaxDim) throw ConfigError("config: bad dimension");
    if (auto* v = get("experiment", "s")) cfg.s = detail::to_double(*v, "s");
    if (!(cfg.s > 0.0)) throw ConfigError("config: s must be positive");
    if (auto* v = get("experiment", "delta_coefficient"))
        cfg.delta_coefficients = {detail::to_double(*v, "delta_coefficient")};
    if (auto* v = get("experiment", "delta_coefficients"))
        cfg.delta_coefficients = detail::to_double_list(*v, "delta_coefficients");
    for (double c : cfg.delta_coefficients)
        if (!(c > 0.0)) throw ConfigError("config: delta coefficients must be positive");
    if (auto* v = get("experiment", "n_list")) {
        cfg.n_list.clear();
        for (double x : detail::to_double_list(*v, "n_list")) {
            if (!(x >= 1.0)) throw ConfigError("config: n_list entries must be >= 1");
            cfg.n_list.push_back(static_cast<std::uint64_t>(x));
        }
    }
    if (cfg.n_list.size() < 3) throw ConfigError("config: n_list needs at least 3 entries");
    for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
        if (cfg.n_list[i] <= cfg.n_list[i - 1])
            throw ConfigError("config: n_list must be strictly increasing");
    if (auto* v = get("experiment", "engine")) {
        if (*v == "brute")
            cfg.engine = EngineMode::brute;
        else if (*v == "grid")
            cfg.engine = EngineMode::grid;
        else if (*v == "both")
            cfg.engine = EngineMode::both;
        else
            throw ConfigError("config: engine must be brute | grid | both");
    }
    if (auto* v = get("experiment", "workers"))
        cfg.workers = static_cast<int>(detail::to_int(*v, "workers"));
    if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
    if (auto* v = get("experiment", "slack")) cfg.slack = detail::to_double(*v, "slack");
    if (auto* v = get("experiment", "record_timing"))
        cfg.record_timing = (*v == "true" || *v == "1" || *v == "yes");
    if (auto* v = get("experiment", "output")) cfg.output = *v;

    if (auto* v = get("generator", "kind")) cfg.generator.kind = *v;
    if (cfg.generator.kind != "grid" && cfg.generator.kind != "jittered")
        throw ConfigError("config: generator kind must be grid | jittered");
    if (auto* v = get("generator", "amplitude"))
        cfg.generator.amplitude = detail::to_double(*v, "amplitude");
    if (auto* v = get("generator", "seed"))
        cfg.generator.seed = static_cast<std::uint64_t>(detail::to_int(*v, "seed"));

    if (auto* v = get("family", "kind")) cfg.family.kind = *v;
    if (auto* v = get("family", "radius")) cfg.family.radius = *v;
    if (auto* v = get("family", "semiaxes"))
        cfg.family.semiaxes = detail::to_double_list(*v, "semiaxes");

    if (auto* v = get("homogeneity", "C0")) cfg.homogeneity.C0 = detail::to_double(*v, "C0");
    if (auto* v = get("homogeneity", "c0")) cfg.homogeneity.c0 = detail::to_double(*v, "c0");
    if (auto* v = get("homogeneity", "k0"))
        cfg.homogeneity.k0 = static_cast<int>(detail::to_int(*v, "k0"));
    if (auto* v = get("homogeneity", "method")) {
        if (*v == "exact")
            cfg.homogeneity_method = ScanMethod::exact;
        else if (*v == "conservative")
            cfg.homogeneity_method = ScanMethod::conservative;
        else if (*v == "auto")
            cfg.homogeneity_method = ScanMethod::automatic;
        else
            throw ConfigError("config: homogeneity method must be exact | conservative | auto");
    }

    // constructability check, so bad family specs fail at parse time
    build_family(cfg.family, cfg.dimension);
    return cfg;
}

struct SweepOutcome {
    std::vector<ScalingFit> fits;  // one per delta coefficient
    RegularityReport regularity;
    std::string csv_text;
    bool engines_agreed = true;
    bool all_homogeneous = true;
    std::vector<std::string> warnings;

    bool bound_respected() const {
        for (const auto& f : fits)
            if (!f.bound_respected) return false;
        return !fits.empty();
    }
};

inline PointSet generate_for_target(const ExperimentConfig& cfg, std::uint64_t n_target,
                                    std::size_t index) {
    double root = std::pow(static_cast<double>(n_target), 1.0 / cfg.dimension);
    int n_axis = std::max(1, static_cast<int>(std::llround(root)));
    if (cfg.generator.kind == "grid") return generate_grid(n_axis, cfg.dimension);
    return generate_jittered(n_axis, cfg.dimension, cfg.generator.amplitude,
                             cfg.generator.seed + index);
}

// Runs the sweep: generate, verify homogeneity, count at delta = c * N^(-1/s),
// emit CSV rows in N-order, fit the log-log slope per coefficient.
inline SweepOutcome run_sweep(const ExperimentConfig& cfg) {
    SurfaceFamily family = build_family(cfg.family, cfg.dimension);
    SweepOutcome out;
    out.regularity =
        analyze_family(family, cfg.regularity_samples, cfg.regularity_seed);

    // admissible-range warning (warned, not rejected)
    if (out.regularity.regime != Regime::Fail && out.regularity.regime != Regime::Indeterminate) {
        bool sphere_body = family.body && family.body->is_ball();
        ExponentPrediction pred =
            predicted_exponent(out.regularity.regime, cfg.dimension, sphere_body);
        if (pred.s_range) {
            double lo = pred.s_range->first.value(), hi = pred.s_range->second.value();
            if (!(cfg.s > lo && cfg.s < hi)) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "s = %g lies outside the admissible range (%g, %g) for this regime",
                              cfg.s, lo, hi);
                out.warnings.emplace_back(buf);
            }
        }
    }

    struct Row {
        std::uint64_t n;
        double delta;
        std::uint64_t count;
        const char* engine;
        std::uint64_t cand;
        std::uint64_t selfinc;
        std::uint64_t wall_ms;
    };
    std::vector<Row> rows;
    std::vector<std::vector<std::pair<double, double>>> fit_pairs(cfg.delta_coefficients.size());

    std::size_t homogeneity_checked = 0;
    bool homogeneity_all_exact = true;
    for (std::size_t in = 0; in < cfg.n_list.size(); ++in) {
        PointSet A = generate_for_target(cfg, cfg.n_list[in], in);
        HomogeneityReport hr =
            check_homogeneity(A, cfg.homogeneity, cfg.homogeneity_method);
        ++homogeneity_checked;
        homogeneity_all_exact = homogeneity_all_exact && hr.method_used == ScanMethod::exact;
        if (!hr.passed) {
            out.all_homogeneous = false;
            std::ostringstream os;
            os << "homogeneity failed at N = " << A.size() << ": ";
            if (hr.max_small_cube_count > cfg.homogeneity.k0)
                os << "cube at " << hr.max_witness.corner[0] << ",... side "
                   << hr.max_witness.side << " holds " << hr.max_small_cube_count << " points";
            else if (hr.empty_large_cell)
                os << "empty cell at " << hr.empty_large_cell->corner[0] << ",... side "
                   << hr.empty_large_cell->side;
            throw std::runtime_error(os.str());
        }

        double n_actual = static_cast<double>(A.size());
        for (std::size_t ic = 0; ic < cfg.delta_coefficients.size(); ++ic) {
            double delta = cfg.delta_coefficients[ic] * std::pow(n_actual, -1.0 / cfg.s);
            IncidenceQuery q = make_query(A, family, delta, nullptr, cfg.workers);

            std::optional<IncidenceCount> brute, grid;
            auto timed = [&](auto&& fn) {
                auto t0 = std::chrono::steady_clock::now();
                IncidenceCount c = fn(q);
                auto t1 = std::chrono::steady_clock::now();
                std::uint64_t ms = cfg.record_timing
                                       ? static_cast<std::uint64_t>(
                                             std::chrono::duration_cast<std::chrono::milliseconds>(
                                                 t1 - t0)
                                                 .count())
                                       : 0;
                return std::make_pair(c, ms);
            };
            std::uint64_t brute_ms = 0, grid_ms = 0;
            if (cfg.engine != EngineMode::grid) {
                auto [c, ms] = timed([](const IncidenceQuery& qq) { return count_brute(qq); });
                brute = c;
                brute_ms = ms;
            }
            if (cfg.engine != EngineMode::brute) {
                auto [c, ms] = timed([](const IncidenceQuery& qq) { return count_grid(qq); });
                grid = c;
                grid_ms = ms;
            }
            if (brute && grid && brute->count != grid->count) {
                out.engines_agreed = false;
                throw std::runtime_error("engine mismatch: brute and grid counts differ; "
                                         "this is a bug, never data");
            }
            if (brute)
                rows.push_back({A.size(), delta, brute->count, "brute",
                                brute->candidate_pairs_examined, brute->self_incidences,
                                brute_ms});
            if (grid)
                rows.push_back({A.size(), delta, grid->count, "grid",
                                grid->candidate_pairs_examined, grid->self_incidences, grid_ms});
            const IncidenceCount& preferred = grid ? *grid : *brute;
            fit_pairs[ic].emplace_back(n_actual, static_cast<double>(preferred.count));
        }
    }

    double count_exponent = 2.0 - 1.0 / cfg.s;
    for (std::size_t ic = 0; ic < cfg.delta_coefficients.size(); ++ic)
        out.fits.push_back(make_scaling_fit(fit_pairs[ic], count_exponent, cfg.slack,
                                            cfg.delta_coefficients[ic]));

    std::ostringstream csv;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(cfg.config_hash()));
    csv << "# config_hash=" << buf << "\n";
    csv << "# regime=" << regime_name(out.regularity.regime)
        << " gamma=" << (out.regularity.gamma ? out.regularity.gamma->str() : std::string("-"));
    std::snprintf(buf, sizeof(buf), "%.6g", out.regularity.min_abs_ma_det);
    csv << " min_abs_ma_det=" << buf << "\n";
    csv << "# homogeneity=pass sets_checked=" << homogeneity_checked
        << " method=" << (homogeneity_all_exact ? "exact" : "mixed") << "\n";
    csv << "N,delta,count,engine,candidate_pairs,self_incidences,wall_ms\n";
    for (const Row& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.delta);
        csv << r.n << "," << buf << "," << r.count << "," << r.engine << "," << r.cand << ","
            << r.selfinc << "," << r.wall_ms << "\n";
    }
    out.csv_text = csv.str();
    return out;
}

// Human-readable summary; pairs with the CLI exit code contract
// (0 iff bound respected and all internal equalities held).
inline std::string report_text(const ExperimentConfig& cfg, const SweepOutcome& out) {
    std::ostringstream os;
    os << "regime: " << regime_name(out.regularity.regime) << "\n";
    os << "gamma: " << (out.regularity.gamma ? out.regularity.gamma->str() : std::string("-"))
       << "\n";
    if (out.regularity.regime != Regime::Fail && out.regularity.regime != Regime::Indeterminate) {
        SurfaceFamily family = build_family(cfg.family, cfg.dimension);
        bool sphere_body = family.body && family.body->is_ball();
        ExponentPrediction pred =
            predicted_exponent(out.regularity.regime, cfg.dimension, sphere_body);
        if (pred.s_range)
            os << "admissible s-range: (" << pred.s_range->first.str() << ", "
               << pred.s_range->second.str() << ")\n";
        else
            os << "admissible s-range: empty\n";
        if (pred.trivial)
            os << "predicted incidence exponent: none nontrivial; trivial bound "
               << pred.incidence_exponent.str() << "\n";
        else
            os << "predicted incidence exponent: " << pred.incidence_exponent.str() << "\n";
    } else {
        os << "predicted incidence exponent: none (regime "
           << regime_name(out.regularity.regime) << ")\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", 2.0 - 1.0 / cfg.s);
    os << "count bound exponent (2 - 1/s): " << buf << "\n";
    for (const auto& f : out.fits) {
        std::snprintf(buf, sizeof(buf), "%.6g", f.fit.slope);
        os << "measured slope (c = ";
        char cb[32];
        std::snprintf(cb, sizeof(cb), "%g", f.delta_coefficient);
        os << cb << "): " << buf << "  [pairs " << f.fit.used_pairs;
        if (f.fit.dropped_zero) os << ", dropped_zero " << f.fit.dropped_zero;
        os << "]\n";
    }
    os << "bound_respected: " << (out.bound_respected() ? "yes" : "no") << "\n";
    for (const auto& w : out.warnings) os << "warning: " << w << "\n";
    return os.str();
}

}  // namespace incilab
