// rmls: benchmark front end for the randomized-evolution linear-system
// solver simulator. Subcommands: gen, run, sweep, check, solve-exact.
//
// Exit codes: 0 success, 1 validation error, 2 property violation, 3 I/O.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmls/engine.hpp"
#include "rmls/format.hpp"

using namespace rmls;

namespace {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("RMLS_SEED")) {
        try {
            size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw ValidationError("RMLS_SEED is set but not a valid unsigned integer");
    }
    return 0;
}

Family parse_variant(const std::string& s) {
    if (s == "ground") return Family::GroundState;
    if (s == "amplified") return Family::GapAmplified;
    throw ValidationError("unknown variant '" + s + "' (expected ground|amplified)");
}

Embedding parse_mode(const std::string& s) {
    if (s == "general") return Embedding::General;
    if (s == "positive") return Embedding::PositiveDefinite;
    throw ValidationError("unknown mode '" + s + "' (expected general|positive)");
}

std::vector<int> parse_q_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        try {
            size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError("bad q value '" + tok + "' in q-list");
        }
    }
    if (out.empty()) {
        throw ValidationError("q-list is empty");
    }
    return out;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const std::string& config, const SweepResult& rows) {
    out << "# config: " << config << "\n";
    out << "q,error,inv_error,expected_time_T,variant,kappa,n,d,nrep,master_seed\n";
    for (const auto& r : rows) {
        out << r.q << ',' << fmt17(r.error) << ',' << fmt17(r.inv_error) << ','
            << fmt17(r.expected_time) << ',' << to_string(r.variant) << ',' << fmt17(r.kappa)
            << ',' << r.n << ',' << r.d << ',' << r.n_rep << ',' << r.master_seed << "\n";
    }
}

struct GenArgs {
    int n = 4;
    int d = 4;
    double kappa = 0.0;
    double kappa_tol = 1e-3;
    int b_sparsity = 0;
    long max_attempts = 2000000;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    GeneratorConfig cfg;
    cfg.n = a.n;
    cfg.d = a.d;
    cfg.kappa_target = a.kappa;
    cfg.kappa_tol = a.kappa_tol;
    cfg.b_sparsity = a.b_sparsity > 0 ? a.b_sparsity : a.d;
    cfg.max_attempts = a.max_attempts;
    cfg.seed = resolve_seed(a.seed);

    const QlspInstance inst = generate_with_kappa(cfg);
    save_instance(inst, a.out);
    std::cout << "wrote " << a.out << "\n"
              << "kappa " << fmt17(inst.kappa) << "\n"
              << "attempts " << inst.attempts << "\n";
    return 0;
}

struct RunArgs {
    std::string instance;
    std::string variant = "amplified";
    std::string mode = "general";
    int q = 0;
    double epsilon = 0.0;
    int nrep = 50;
    double cq = 1.0;
    int threads = 0;
    double kappa_ceiling = 1e4;
    std::optional<std::uint64_t> seed;
    std::string out;
};

std::string run_config_line(const RunArgs& a, std::uint64_t seed, bool used_epsilon) {
    std::ostringstream os;
    os << "rmls run --instance " << a.instance << " --variant " << a.variant << " --mode "
       << a.mode;
    if (used_epsilon) {
        os << " --epsilon " << fmt17(a.epsilon) << " --cq " << fmt17(a.cq);
    } else {
        os << " --q " << a.q;
    }
    os << " --nrep " << a.nrep << " --seed " << seed;
    return os.str();
}

int cmd_run(const RunArgs& a) {
    if ((a.q > 0) == (a.epsilon > 0.0)) {
        throw ValidationError("exactly one of --q and --epsilon is required");
    }
    const QlspInstance inst = load_instance(a.instance);
    const Family variant = parse_variant(a.variant);
    const Embedding mode = parse_mode(a.mode);
    const std::uint64_t seed = resolve_seed(a.seed);
    const bool used_epsilon = a.epsilon > 0.0;

    const Schedule sched = used_epsilon ? build_schedule(inst.kappa, a.epsilon, variant, a.cq)
                                        : build_schedule_with_q(inst.kappa, a.q, variant);

    EngineOptions opts;
    opts.mode = mode;
    opts.threads = a.threads;
    opts.kappa_ceiling = a.kappa_ceiling;

    const auto t0 = std::chrono::steady_clock::now();
    const EnsembleResult res = run_ensemble(inst, sched, a.nrep, seed, opts);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string config = run_config_line(a, seed, used_epsilon);
    std::cout << "# config: " << config << "\n"
              << "# kappa " << fmt17(inst.kappa) << "\n"
              << "# q " << sched.q << "\n"
              << "error " << fmt17(res.error) << "\n"
              << "inv_error " << fmt17(1.0 / res.error) << "\n"
              << "expected_time_T " << fmt17(res.total_expected_time) << "\n"
              << "full_fidelity " << fmt17(res.full_fidelity) << "\n"
              << "wall_time_s " << wall << "\n";

    if (!a.out.empty()) {
        SweepResult rows{SweepRow{sched.q, res.error, 1.0 / res.error, res.total_expected_time,
                                  variant, inst.kappa, inst.n, inst.d, a.nrep, seed}};
        auto out = open_output(a.out);
        write_sweep_csv(out, config, rows);
    }
    return 0;
}

struct SweepArgs {
    std::string instance;
    std::string variant = "amplified";
    std::string mode = "general";
    std::string q_list;
    int nrep = 50;
    int threads = 0;
    double kappa_ceiling = 1e4;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string gnuplot;
};

int cmd_sweep(const SweepArgs& a) {
    const QlspInstance inst = load_instance(a.instance);
    const Family variant = parse_variant(a.variant);
    const std::vector<int> qs = parse_q_list(a.q_list);
    const std::uint64_t seed = resolve_seed(a.seed);

    EngineOptions opts;
    opts.mode = parse_mode(a.mode);
    opts.threads = a.threads;
    opts.kappa_ceiling = a.kappa_ceiling;

    const SweepResult rows = error_vs_q_sweep(inst, qs, variant, a.nrep, seed, opts);

    std::ostringstream config;
    config << "rmls sweep --instance " << a.instance << " --variant " << a.variant << " --mode "
           << a.mode << " --q-list " << a.q_list << " --nrep " << a.nrep << " --seed " << seed;
    auto out = open_output(a.out);
    write_sweep_csv(out, config.str(), rows);
    std::cout << "wrote " << a.out << " (" << rows.size() << " rows)\n";

    if (!a.gnuplot.empty()) {
        auto gp = open_output(a.gnuplot);
        gp << "# gnuplot script for " << a.out << "\n"
           << "set datafile separator ','\n"
           << "set xlabel 'q'\n"
           << "set ylabel '1/error'\n"
           << "set key left top\n"
           << "plot '" << a.out << "' every ::1 using 1:3 with linespoints title '" << a.variant
           << ", kappa=" << fmt17(inst.kappa) << ", nrep=" << a.nrep << "'\n";
        std::cout << "wrote " << a.gnuplot << "\n";
    }
    return 0;
}

struct CheckArgs {
    std::string instance;
    int s_grid = 101;
    std::string mode = "general";
    std::string variant = "both";
};

int cmd_check(const CheckArgs& a) {
    if (a.s_grid < 2) {
        throw ValidationError("--s-grid must be at least 2");
    }
    const QlspInstance inst = load_instance(a.instance);
    const Embedding mode = parse_mode(a.mode);
    const bool do_ground = a.variant == "both" || a.variant == "ground";
    const bool do_amplified = a.variant == "both" || a.variant == "amplified";
    if (!do_ground && !do_amplified) {
        throw ValidationError("unknown variant '" + a.variant + "' (expected ground|amplified|both)");
    }

    int violations = 0;
    auto flag = [&violations](bool ok) {
        if (!ok) ++violations;
        return ok ? "" : "  <-- VIOLATION";
    };

    std::cout << "instance " << a.instance << "  kappa " << fmt17(inst.kappa) << "  N "
              << inst.dim() << "\n";

    if (do_ground) {
        std::cout << "\n[ground-state family]\n";
        std::cout << "       s    kernel        gap      bound   psd_defect\n";
        for (int i = 0; i < a.s_grid; ++i) {
            const double s = static_cast<double>(i) / (a.s_grid - 1);
            const SpectralReport rep = spectral_report(inst, s, mode, Family::GroundState);
            const bool ok = rep.kernel_dim == 1 && rep.gap >= rep.gap_bound - 1e-9 &&
                            rep.psd_defect <= 1e-10;
            std::printf("%8.4f  %6d  %10.3e %10.3e  %10.3e%s\n", rep.s, rep.kernel_dim, rep.gap,
                        rep.gap_bound, rep.psd_defect, flag(ok));
        }
    }

    if (do_amplified) {
        std::cout << "\n[gap-amplified family]\n";
        std::cout << "       s    kernel        gap      bound   sym_defect  pair_defect\n";
        for (int i = 0; i < a.s_grid; ++i) {
            const double s = static_cast<double>(i) / (a.s_grid - 1);
            const SpectralReport rep = spectral_report(inst, s, mode, Family::GapAmplified);
            const bool ok = rep.kernel_dim == 2 && rep.gap >= rep.gap_bound - 1e-9 &&
                            rep.symmetry_defect <= 1e-12 && rep.psd_defect <= 1e-8;
            std::printf("%8.4f  %6d  %10.3e %10.3e  %10.3e  %10.3e%s\n", rep.s, rep.kernel_dim,
                        rep.gap, rep.gap_bound, rep.symmetry_defect, rep.psd_defect, flag(ok));
        }

        const double nt = no_transition_defect(inst, mode, 11);
        std::cout << "\nno-transition defect (11x11 grid): " << fmt17(nt)
                  << flag(nt <= 1e-10) << "\n";

        double worst_sq = 0.0, worst_iso = 0.0;
        for (int i = 0; i < a.s_grid; ++i) {
            const double s = static_cast<double>(i) / (a.s_grid - 1);
            worst_sq = std::max(worst_sq, block_square_defect(inst, s, mode));
            worst_iso = std::max(worst_iso, isospectral_defect(inst, s, mode));
        }
        std::cout << "block-square defect (grid max):    " << fmt17(worst_sq)
                  << flag(worst_sq <= 1e-10) << "\n";
        std::cout << "isospectral defect (grid max):     " << fmt17(worst_iso)
                  << flag(worst_iso <= 1e-9) << "\n";
    }

    if (violations > 0) {
        throw PropertyViolation(std::to_string(violations) + " spectral check(s) failed");
    }
    std::cout << "\nall checks passed\n";
    return 0;
}

struct SolveArgs {
    std::string instance;
    std::string out;
};

int cmd_solve_exact(const SolveArgs& a) {
    const QlspInstance inst = load_instance(a.instance);
    const StateVector x = exact_solution(inst);
    const Vec x_un = inst.A.mat().fullPivLu().solve(inst.b.vec());
    const double residual = (inst.A.mat() * x_un - inst.b.vec()).norm();

    std::ostringstream body;
    body << "# exact solution amplitudes (index re im)\n";
    for (Eigen::Index i = 0; i < x.dim(); ++i) {
        body << i << " " << fmt17(x.vec()[i].real()) << " " << fmt17(x.vec()[i].imag()) << "\n";
    }
    body << "residual " << fmt17(residual) << "\n";

    std::cout << body.str();
    if (!a.out.empty()) {
        auto out = open_output(a.out);
        out << body.str();
    }
    return 0;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"randomized-evolution linear-system solver benchmark"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a .qlsp instance");
    gen_cmd->add_option("--n", gen.n, "qubit count (N = 2^n)")->required();
    gen_cmd->add_option("--d", gen.d, "row sparsity bound")->required();
    gen_cmd->add_option("--kappa", gen.kappa, "condition-number target (0 = accept first draw)");
    gen_cmd->add_option("--kappa-tol", gen.kappa_tol, "absolute kappa tolerance");
    gen_cmd->add_option("--b-sparsity", gen.b_sparsity, "nonzeros in b (default: d)");
    gen_cmd->add_option("--max-attempts", gen.max_attempts, "post-selection attempt budget");
    gen_cmd->add_option("--seed", gen.seed, "master seed (fallback: RMLS_SEED, then 0)");
    gen_cmd->add_option("--out", gen.out, "output path")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "run one ensemble");
    run_cmd->add_option("--instance", run.instance, "instance file")->required();
    run_cmd->add_option("--variant", run.variant, "ground|amplified");
    run_cmd->add_option("--mode", run.mode, "general|positive");
    run_cmd->add_option("--q", run.q, "number of steps");
    run_cmd->add_option("--epsilon", run.epsilon, "target precision (q computed)");
    run_cmd->add_option("--cq", run.cq, "step-count constant C_q");
    run_cmd->add_option("--nrep", run.nrep, "repetitions");
    run_cmd->add_option("--threads", run.threads, "worker threads (0 = hardware)");
    run_cmd->add_option("--kappa-ceiling", run.kappa_ceiling, "refuse instances above this kappa");
    run_cmd->add_option("--seed", run.seed, "master seed (fallback: RMLS_SEED, then 0)");
    run_cmd->add_option("--out", run.out, "optional CSV output");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "error-vs-q sweep to CSV");
    sweep_cmd->add_option("--instance", sweep.instance, "instance file")->required();
    sweep_cmd->add_option("--variant", sweep.variant, "ground|amplified");
    sweep_cmd->add_option("--mode", sweep.mode, "general|positive");
    sweep_cmd->add_option("--q-list", sweep.q_list, "comma-separated ascending step counts")->required();
    sweep_cmd->add_option("--nrep", sweep.nrep, "repetitions per q");
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = hardware)");
    sweep_cmd->add_option("--seed", sweep.seed, "master seed (fallback: RMLS_SEED, then 0)");
    sweep_cmd->add_option("--out", sweep.out, "CSV output path")->required();

    CheckArgs check;
    auto* check_cmd = app.add_subcommand("check", "verify spectral properties");
    check_cmd->add_option("--instance", check.instance, "instance file")->required();
    check_cmd->add_option("--s-grid", check.s_grid, "grid size over s in [0,1]");
    check_cmd->add_option("--mode", check.mode, "general|positive");
    check_cmd->add_option("--variant", check.variant, "ground|amplified|both");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve-exact", "classical reference solution");
    solve_cmd->add_option("--instance", solve.instance, "instance file")->required();
    solve_cmd->add_option("--out", solve.out, "optional output path");

    CLI11_PARSE(app, argc, argv);

    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (run_cmd->parsed()) return cmd_run(run);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    if (check_cmd->parsed()) return cmd_check(check);
    if (solve_cmd->parsed()) return cmd_solve_exact(solve);
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PropertyViolation& e) {
        std::cerr << "property violation: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
