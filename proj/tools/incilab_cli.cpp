// Command-line front end: point-set generation, homogeneity checks, family
// verification, incidence counting, s-energy, Fourier decay tables and full
// N-sweeps driven by a key = value config file.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "incilab/incilab.hpp"

namespace {

using namespace incilab;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

PointSet load_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open point set file: " + path);
    return load_point_set(in);
}

void write_or_print(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    out << text;
}

int cmd_gen(const std::string& kind, int n, int dim, double amplitude, std::uint64_t seed,
            const std::string& out_path) {
    PointSet ps = (kind == "grid") ? generate_grid(n, dim)
                                   : generate_jittered(n, dim, amplitude, seed);
    std::ostringstream os;
    save_point_set(ps, os);
    write_or_print(os.str(), out_path);
    return 0;
}

int cmd_check(const std::string& in_path, double C0, double c0, int k0,
              const std::string& method) {
    PointSet ps = load_set(in_path);
    ScanMethod m = ScanMethod::automatic;
    if (method == "exact") m = ScanMethod::exact;
    else if (method == "conservative") m = ScanMethod::conservative;
    HomogeneityReport rep = check_homogeneity(ps, {C0, c0, k0}, m);
    std::printf("passed: %s\n", rep.passed ? "yes" : "no");
    std::printf("method: %s\n",
                rep.method_used == ScanMethod::exact ? "exact" : "conservative");
    std::printf("max_small_cube_count: %d%s\n", rep.max_small_cube_count,
                rep.packing_is_lower_bound ? " (lower bound)" : "");
    std::printf("max_witness_corner:");
    for (int i = 0; i < rep.max_witness.corner.dim(); ++i)
        std::printf(" %.17g", rep.max_witness.corner[i]);
    std::printf("\nmax_witness_side: %.17g\n", rep.max_witness.side);
    if (rep.empty_large_cell) {
        std::printf("empty_large_cell_corner:");
        for (int i = 0; i < rep.empty_large_cell->corner.dim(); ++i)
            std::printf(" %.17g", rep.empty_large_cell->corner[i]);
        std::printf("\nempty_large_cell_side: %.17g\n", rep.empty_large_cell->side);
    }
    return rep.passed ? 0 : 1;
}

int cmd_verify(const std::string& config_path, std::size_t samples, std::uint64_t seed) {
    ExperimentConfig cfg = parse_config(read_file(config_path));
    SurfaceFamily family = build_family(cfg.family, cfg.dimension);
    RegularityReport rep = analyze_family(family, samples, seed);
    std::cout << to_text(rep);
    if (rep.regime != Regime::Fail && rep.regime != Regime::Indeterminate) {
        bool sphere_body = family.body && family.body->is_ball();
        ExponentPrediction pred = predicted_exponent(rep.regime, cfg.dimension, sphere_body);
        if (pred.s_range)
            std::cout << "admissible_s_range: (" << pred.s_range->first.str() << ", "
                      << pred.s_range->second.str() << ")\n";
        else
            std::cout << "admissible_s_range: empty\n";
        std::cout << "incidence_exponent: " << pred.incidence_exponent.str()
                  << (pred.trivial ? " (trivial bound)" : "") << "\n";
    }
    return rep.regime == Regime::Fail ? 1 : 0;
}

int cmd_count(const std::string& config_path, const std::string& in_path, int n_target,
              double delta, const std::string& engine, int workers) {
    ExperimentConfig cfg = parse_config(read_file(config_path));
    SurfaceFamily family = build_family(cfg.family, cfg.dimension);
    std::optional<PointSet> ps;
    if (!in_path.empty())
        ps = load_set(in_path);
    else if (n_target > 0)
        ps = generate_for_target(cfg, static_cast<std::uint64_t>(n_target), 0);
    else
        throw ConfigError("count: need --in or --n-target");
    IncidenceQuery q = make_query(*ps, family, delta, nullptr, workers);

    auto show = [&](const IncidenceCount& c, const char* name) {
        std::printf("%s: count=%llu candidate_pairs=%llu self_incidences=%llu%s\n", name,
                    static_cast<unsigned long long>(c.count),
                    static_cast<unsigned long long>(c.candidate_pairs_examined),
                    static_cast<unsigned long long>(c.self_incidences),
                    c.membership_used == MembershipRule::proxy ? " membership=proxy" : "");
    };
    if (engine == "brute" || engine == "both") show(count_brute(q), "brute");
    if (engine == "grid" || engine == "both") {
        IncidenceCount g = count_grid(q);
        show(g, "grid");
        if (engine == "both") {
            IncidenceCount b = count_brute(q);
            if (b.count != g.count) {
                std::fprintf(stderr, "engine mismatch: brute=%llu grid=%llu\n",
                             static_cast<unsigned long long>(b.count),
                             static_cast<unsigned long long>(g.count));
                return 1;
            }
        }
    }
    return 0;
}

int cmd_energy(const std::string& in_path, double s, double delta, double delta_coefficient,
               const std::string& out_path) {
    PointSet ps = load_set(in_path);
    if (delta <= 0.0) {
        if (delta_coefficient <= 0.0)
            throw ConfigError("energy: need --delta or --delta-coefficient");
        delta = delta_coefficient * std::pow(static_cast<double>(ps.size()), -1.0 / s);
    }
    EnergyResult e = s_energy(ps, s, delta);
    char row[256];
    std::snprintf(row, sizeof(row), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", ps.size(), e.s,
                  e.delta, e.offdiag_sum, e.diag_term, e.total);
    if (out_path.empty()) {
        std::printf("N,s,delta,offdiag,diag,total\n%s", row);
        return 0;
    }
    bool exists = static_cast<bool>(std::ifstream(out_path));
    std::ofstream out(out_path, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + out_path);
    if (!exists) out << "N,s,delta,offdiag,diag,total\n";
    out << row;
    return 0;
}

int cmd_decay(int dim, double xi_min, double xi_max, int points) {
    if (points < 1) throw ConfigError("decay: points must be >= 1");
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid.push_back(xi_min * std::pow(xi_max / xi_min, t));
    }
    DecayResult dr = check_decay(dim, grid);
    std::printf("xi,sigma_hat,product,derivative_product\n");
    for (std::size_t i = 0; i < dr.xi_magnitudes.size(); ++i)
        std::printf("%.17g,%.17g,%.17g,%.17g\n", dr.xi_magnitudes[i], dr.sigma_hat_values[i],
                    dr.normalized_products[i], dr.derivative_products[i]);
    std::printf("# sup_product=%.17g sup_derivative_product=%.17g\n", dr.sup_product,
                dr.sup_derivative_product);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override, int workers) {
    ExperimentConfig cfg = parse_config(read_file(config_path));
    if (workers > 0) cfg.workers = workers;
    SweepOutcome out = run_sweep(cfg);
    std::string csv_path = out_override.empty() ? cfg.output : out_override;
    if (!csv_path.empty()) {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write: " + csv_path);
        f << out.csv_text;
    } else {
        std::cout << out.csv_text;
    }
    std::cout << report_text(cfg, out);
    return (out.bound_respected() && out.engines_agreed && out.all_homogeneous) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"incidence laboratory"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "emit a point set");
    std::string gen_kind = "grid", gen_out;
    int gen_n = 10, gen_dim = 2;
    double gen_amp = 0.25;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gen_kind)->check(CLI::IsMember({"grid", "jittered"}));
    gen->add_option("--n", gen_n, "points per axis")->required();
    gen->add_option("--dim", gen_dim);
    gen->add_option("--amplitude", gen_amp);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out);

    // check
    auto* check = app.add_subcommand("check", "homogeneity check");
    std::string check_in, check_method = "auto";
    double check_C0 = 2.0, check_c0 = 0.9;
    int check_k0 = 1;
    check->add_option("--in", check_in)->required();
    check->add_option("--C0", check_C0);
    check->add_option("--c0", check_c0);
    check->add_option("--k0", check_k0);
    check->add_option("--method", check_method)
        ->check(CLI::IsMember({"exact", "conservative", "auto"}));

    // verify
    auto* verify = app.add_subcommand("verify", "regularity report for the config's family");
    std::string verify_cfg;
    std::size_t verify_samples = 400;
    std::uint64_t verify_seed = 2026;
    verify->add_option("--config", verify_cfg)->required();
    verify->add_option("--samples", verify_samples);
    verify->add_option("--seed", verify_seed);

    // count
    auto* count = app.add_subcommand("count", "single incidence query");
    std::string count_cfg, count_in, count_engine = "grid";
    int count_n = 0, count_workers = 1;
    double count_delta = 0.0;
    count->add_option("--config", count_cfg)->required();
    count->add_option("--in", count_in, "point set file (else --n-target generates one)");
    count->add_option("--n-target", count_n);
    count->add_option("--delta", count_delta);
    count->add_option("--engine", count_engine)
        ->check(CLI::IsMember({"brute", "grid", "both"}));
    count->add_option("--workers", count_workers);

    // energy
    auto* energy = app.add_subcommand("energy", "discrete s-energy of a point set");
    std::string energy_in, energy_out;
    double energy_s = 1.5, energy_delta = 0.0, energy_coeff = 0.0;
    energy->add_option("--in", energy_in)->required();
    energy->add_option("--s", energy_s)->required();
    energy->add_option("--delta", energy_delta);
    energy->add_option("--delta-coefficient", energy_coeff,
                       "sets delta = c * N^(-1/s) when --delta is absent");
    energy->add_option("--out", energy_out, "CSV file to append to");

    // decay
    auto* decay = app.add_subcommand("decay", "surface-measure Fourier decay table");
    int decay_dim = 3, decay_points = 50;
    double decay_min = 1.0, decay_max = 100.0;
    decay->add_option("--dim", decay_dim)->check(CLI::IsMember({"2", "3"}));
    decay->add_option("--xi-min", decay_min);
    decay->add_option("--xi-max", decay_max);
    decay->add_option("--points", decay_points);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "full experiment from a config file");
    std::string sweep_cfg, sweep_out;
    int sweep_workers = 0;
    sweep->add_option("--config", sweep_cfg)->required();
    sweep->add_option("--out", sweep_out, "override the config's output path");
    sweep->add_option("--workers", sweep_workers, "override the config's worker count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*gen) return cmd_gen(gen_kind, gen_n, gen_dim, gen_amp, gen_seed, gen_out);
        if (*check) return cmd_check(check_in, check_C0, check_c0, check_k0, check_method);
        if (*verify) return cmd_verify(verify_cfg, verify_samples, verify_seed);
        if (*count)
            return cmd_count(count_cfg, count_in, count_n, count_delta, count_engine,
                             count_workers);
        if (*energy)
            return cmd_energy(energy_in, energy_s, energy_delta, energy_coeff, energy_out);
        if (*decay) return cmd_decay(decay_dim, decay_min, decay_max, decay_points);
        if (*sweep) return cmd_sweep(sweep_cfg, sweep_out, sweep_workers);
    } catch (const incilab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
