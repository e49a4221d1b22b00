#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmls/engine.hpp"
#include "support/test_helpers.hpp"

using namespace rmls;

namespace {

QlspInstance kappa2_instance() {
    GeneratorConfig cfg;
    cfg.n = 2;
    cfg.d = 2;
    cfg.b_sparsity = 2;
    cfg.kappa_target = 2.0;
    cfg.seed = 3;
    return generate_with_kappa(cfg);
}

// Per-repetition infidelity of the traced-out system state against |x><x|.
std::vector<double> per_rep_infidelities(const QlspInstance& inst, const EnsembleResult& res,
                                         int ancillas) {
    const Vec x = exact_solution(inst).vec();
    std::vector<double> out;
    out.reserve(res.records.size());
    for (const auto& rec : res.records) {
        const DensityMatrix reduced =
            partial_trace_leading_qubits(DensityMatrix::pure(rec.final_state), ancillas);
        out.push_back(1.0 - (x.adjoint() * reduced.mat() * x)(0, 0).real());
    }
    return out;
}

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

} // namespace

TEST_CASE("identity instance is stationary: zero error in both variants") {
    const QlspInstance inst = testutil::identity_instance(2);
    EngineOptions opts;
    opts.mode = Embedding::PositiveDefinite;
    for (Family variant : {Family::GroundState, Family::GapAmplified}) {
        for (int q : {5, 80}) {
            const Schedule sched = build_schedule_with_q(inst.kappa, q, variant);
            const EnsembleResult res = run_ensemble(inst, sched, 4, 99, opts);
            CHECK(res.error <= 1e-9);
        }
    }
}

TEST_CASE("zero evolution times leave the initial state untouched") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 25, Family::GapAmplified);
    Engine engine(inst, sched, EngineOptions{});
    const RunRecord rec = engine.run_with_times(std::vector<double>(25, 0.0));
    Vec init = Vec::Zero(4 * inst.dim()); // |0> (x) |x(0)>
    init.head(2 * inst.dim()) = eigenpath_state(inst, 0.0, Embedding::General).vec();
    CHECK((rec.final_state.vec() - init).norm() < 1e-12);
}

TEST_CASE("replay with the same derived seed is bitwise identical") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 50, Family::GroundState);
    Engine engine(inst, sched, EngineOptions{});
    const RunRecord a = engine.run_single(777);
    const RunRecord b = engine.run_single(777);
    CHECK(a.final_state.vec() == b.final_state.vec());
    CHECK(a.sampled_times == b.sampled_times);
}

TEST_CASE("n_rep = 1 gives the reduced projector of the single run") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 40, Family::GapAmplified);
    EngineOptions opts;
    opts.keep_records = true;
    Engine engine(inst, sched, opts);
    const EnsembleResult res = engine.run_ensemble(1, 5);
    REQUIRE(res.records.size() == 1);
    const DensityMatrix expected =
        partial_trace_leading_qubits(DensityMatrix::pure(res.records[0].final_state), 2);
    CHECK((res.rho_tilde.mat() - expected.mat()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("unit norm survives ~500 evolutions") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 500, Family::GroundState);
    Engine engine(inst, sched, EngineOptions{});
    const RunRecord rec = engine.run_single(31337);
    CHECK(std::abs(rec.final_state.vec().norm() - 1.0) <= 1e-9);
}

TEST_CASE("amplified runs never leak into the second kernel state") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 100, Family::GapAmplified);
    Engine engine(inst, sched, EngineOptions{});
    Vec one_b = Vec::Zero(4 * inst.dim());
    one_b.tail(2 * inst.dim()) = barred_b(inst.b, Embedding::General).vec();
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const RunRecord rec = engine.run_single(seed);
        CHECK(std::abs(one_b.dot(rec.final_state.vec())) <= 1e-9);
    }
}

TEST_CASE("ensemble result is identical for any worker count") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 60, Family::GapAmplified);
    EngineOptions serial;
    serial.threads = 1;
    EngineOptions parallel;
    parallel.threads = 4;
    const EnsembleResult a = run_ensemble(inst, sched, 32, 11, serial);
    const EnsembleResult b = run_ensemble(inst, sched, 32, 11, parallel);
    CHECK((a.rho_tilde.mat() - b.rho_tilde.mat()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.error == b.error);
}

TEST_CASE("finite-sampling density matrix converges as n_rep grows") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 80, Family::GapAmplified);
    Engine engine(inst, sched, EngineOptions{});
    // repetition seeds depend only on (master, index), so ensembles nest
    const EnsembleResult r50 = engine.run_ensemble(50, 7);
    const EnsembleResult r200 = engine.run_ensemble(200, 7);
    const EnsembleResult r800 = engine.run_ensemble(800, 7);
    const double d1 = (r50.rho_tilde.mat() - r200.rho_tilde.mat()).norm();
    const double d2 = (r200.rho_tilde.mat() - r800.rho_tilde.mat()).norm();
    CHECK(d2 < d1);
}

TEST_CASE("error meets the step-count budget and is seed-stable") {
    const QlspInstance inst = kappa2_instance();
    const int q = 200;
    const int n_rep = 500;
    const Schedule sched = build_schedule_with_q(inst.kappa, q, Family::GapAmplified);
    EngineOptions opts;
    opts.keep_records = true;
    Engine engine(inst, sched, opts);

    const EnsembleResult r1 = engine.run_ensemble(n_rep, 1001);
    const EnsembleResult r2 = engine.run_ensemble(n_rep, 2002);

    const double lstar = path_length_bound(inst.kappa);
    const double eps = lstar * lstar / q;
    CHECK(r1.error <= eps);
    CHECK(r2.error <= eps);

    const auto inf1 = per_rep_infidelities(inst, r1, 2);
    const auto inf2 = per_rep_infidelities(inst, r2, 2);
    const double noise = 2.0 * (stddev(inf1) + stddev(inf2)) / std::sqrt(double(n_rep)) + 1e-3;
    CHECK(std::abs(r1.error - r2.error) <= noise);
}

TEST_CASE("ideal measurement trace: bounds and scaling") {
    const QlspInstance inst = kappa2_instance();
    const Schedule s100 = build_schedule_with_q(inst.kappa, 100, Family::GroundState);
    const auto [fids, success] = ideal_measurement_trace(inst, s100, Embedding::General);
    REQUIRE(fids.size() == 100);
    CHECK(success >= 1.0 - 100.0 * s100.delta * s100.delta);
    double min100 = 1.0;
    for (double f : fids) min100 = std::min(min100, f);

    const Schedule s200 = build_schedule_with_q(inst.kappa, 200, Family::GroundState);
    const auto [fids200, success200] = ideal_measurement_trace(inst, s200, Embedding::General);
    double min200 = 1.0;
    for (double f : fids200) min200 = std::min(min200, f);
    CHECK(min200 > min100);
    CHECK(success200 > success);
}

TEST_CASE("ideal measurement trace: constant path for the identity instance") {
    const QlspInstance inst = testutil::identity_instance(2);
    const Schedule sched = build_schedule_with_q(inst.kappa, 20, Family::GroundState);
    const auto [fids, success] = ideal_measurement_trace(inst, sched, Embedding::PositiveDefinite);
    for (double f : fids) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(success == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("error_vs_q_sweep: single q row is sane") {
    const QlspInstance inst = kappa2_instance();
    const SweepResult rows = error_vs_q_sweep(inst, {60}, Family::GapAmplified, 40, 5);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].q == 60);
    CHECK(rows[0].error >= 0.0);
    CHECK(rows[0].error <= 1.0);
    CHECK(rows[0].inv_error == doctest::Approx(1.0 / rows[0].error));
    CHECK(rows[0].n_rep == 40);
    CHECK(rows[0].kappa == inst.kappa);
}

TEST_CASE("error_vs_q_sweep: rejects empty and unsorted q lists") {
    const QlspInstance inst = kappa2_instance();
    CHECK_THROWS_AS(error_vs_q_sweep(inst, {}, Family::GroundState, 5, 1), ValidationError);
    CHECK_THROWS_AS(error_vs_q_sweep(inst, {50, 40}, Family::GroundState, 5, 1), ValidationError);
}

TEST_CASE("error_vs_q_sweep: inverse error grows linearly, tighter with more reps") {
    const QlspInstance inst = kappa2_instance();
    const std::vector<int> qs = {50, 100, 150, 200, 300, 400};
    const SweepResult lo = error_vs_q_sweep(inst, qs, Family::GapAmplified, 30, 12);
    const SweepResult hi = error_vs_q_sweep(inst, qs, Family::GapAmplified, 300, 12);

    auto fit_of = [&](const SweepResult& rows) {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            x.push_back(r.q);
            y.push_back(r.inv_error);
        }
        return testutil::linear_fit(x, y);
    };
    const auto fit_lo = fit_of(lo);
    const auto fit_hi = fit_of(hi);
    CHECK(fit_lo.slope > 0.0);
    CHECK(fit_hi.slope > 0.0);
    CHECK(fit_hi.r2 >= 0.9);

    // dispersion around the fit, normalized by the mean level, shrinks with n_rep
    auto dispersion = [&](const SweepResult& rows, const testutil::LinearFit& fit) {
        double ss = 0.0, level = 0.0;
        for (const auto& r : rows) {
            const double pred = fit.slope * r.q + fit.intercept;
            ss += (r.inv_error - pred) * (r.inv_error - pred);
            level += r.inv_error;
        }
        return std::sqrt(ss / static_cast<double>(rows.size())) / (level / static_cast<double>(rows.size()));
    };
    CHECK(dispersion(hi, fit_hi) < dispersion(lo, fit_lo));
}

TEST_CASE("engine refuses instances above the kappa ceiling") {
    const QlspInstance inst = kappa2_instance();
    const Schedule sched = build_schedule_with_q(inst.kappa, 10, Family::GroundState);
    EngineOptions opts;
    opts.kappa_ceiling = 1.5;
    CHECK_THROWS_WITH_AS(Engine(inst, sched, opts), doctest::Contains("ceiling"), ValidationError);
}
