#include "rmls/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "rmls/format.hpp"

namespace rmls {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
    }
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

int ancilla_count(Family variant, Embedding mode) {
    const int base = mode == Embedding::General ? 1 : 0;
    return variant == Family::GapAmplified ? base + 1 : base;
}

// Runs start on the eigenpath at s = 0 (in the general embedding that is
// |-, b>, which A(0) maps to the embedded source state), padded with |0> on
// the extra ancilla for the amplified family.
Vec initial_state(const QlspInstance& inst, Family variant, Embedding mode) {
    const Vec x0 = eigenpath_state(inst, 0.0, mode).vec();
    if (variant == Family::GroundState) return x0;
    Vec out = Vec::Zero(2 * x0.size());
    out.head(x0.size()) = x0;
    return out;
}

Vec ideal_final_state(const QlspInstance& inst, Family variant, Embedding mode) {
    const Vec x = exact_solution(inst).vec();
    Vec full;
    if (mode == Embedding::General) {
        full.resize(2 * x.size()); // |+> (x) |x>
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        full.head(x.size()) = inv_sqrt2 * x;
        full.tail(x.size()) = inv_sqrt2 * x;
    } else {
        full = x;
    }
    if (variant == Family::GapAmplified) {
        Vec padded = Vec::Zero(2 * full.size());
        padded.head(full.size()) = full;
        full = std::move(padded);
    }
    return full;
}

} // namespace

Engine::Engine(QlspInstance inst, Schedule sched, EngineOptions opts)
    : inst_(std::move(inst)), sched_(std::move(sched)), opts_(opts) {
    if (inst_.kappa > opts_.kappa_ceiling) {
        throw ValidationError("engine: instance kappa = " + fmt17(inst_.kappa) +
                              " exceeds the ceiling " + fmt17(opts_.kappa_ceiling) +
                              "; ground-state time widths scale as 2 pi kappa^2");
    }
    ancillas_ = ancilla_count(sched_.variant, opts_.mode);
    initial_ = initial_state(inst_, sched_.variant, opts_.mode);
    ideal_full_ = ideal_final_state(inst_, sched_.variant, opts_.mode);

    cache_.resize(sched_.points.size());
    parallel_for(static_cast<int>(sched_.points.size()), opts_.threads, [&](int j) {
        const double s = sched_.points[static_cast<size_t>(j)].s;
        const HamiltonianSlice slice = sched_.variant == Family::GroundState
                                           ? build_H(inst_, s, opts_.mode)
                                           : build_Hprime(inst_, s, opts_.mode);
        cache_[static_cast<size_t>(j)] = eigh(slice.H);
    });
}

RunRecord Engine::run_with_times(std::vector<double> times, std::uint64_t seed_label,
                                 int rep_index) const {
    if (times.size() != sched_.points.size()) {
        throw ValidationError("engine: expected " + std::to_string(sched_.points.size()) +
                              " evolution times, got " + std::to_string(times.size()));
    }
    StateVector psi(initial_);
    for (size_t j = 0; j < times.size(); ++j) {
        psi = evolve(psi, cache_[j], times[j]);
    }
    return RunRecord{rep_index, seed_label, std::move(times), std::move(psi)};
}

RunRecord Engine::run_single(std::uint64_t derived_seed, int rep_index) const {
    Rng rng(derived_seed);
    return run_with_times(sample_times(sched_, rng), derived_seed, rep_index);
}

EnsembleResult Engine::run_ensemble(int n_rep, std::uint64_t master_seed) const {
    if (n_rep < 1) {
        throw ValidationError("run_ensemble: n_rep must be >= 1");
    }
    std::vector<Vec> finals(static_cast<size_t>(n_rep));
    std::vector<RunRecord> records;
    if (opts_.keep_records) {
        records.reserve(static_cast<size_t>(n_rep));
    }
    std::mutex record_mutex;
    std::vector<std::pair<int, RunRecord>> kept;
    parallel_for(n_rep, opts_.threads, [&](int i) {
        RunRecord rec = run_single(mix_seed(master_seed, static_cast<std::uint64_t>(i)), i);
        finals[static_cast<size_t>(i)] = rec.final_state.vec();
        if (opts_.keep_records) {
            std::lock_guard lock(record_mutex);
            kept.emplace_back(i, std::move(rec));
        }
    });

    // Serial reduction in repetition order keeps the result independent of
    // the worker count, bit for bit.
    const Eigen::Index D = initial_.size();
    Mat acc = Mat::Zero(D, D);
    for (const auto& f : finals) {
        acc.noalias() += f * f.adjoint();
    }
    acc /= static_cast<double>(n_rep);

    DensityMatrix rho_full(std::move(acc));
    DensityMatrix rho_tilde = partial_trace_leading_qubits(rho_full, ancillas_);
    const double error = trace_distance(rho_tilde, DensityMatrix::pure(exact_solution(inst_)));
    const double fidelity = (ideal_full_.adjoint() * rho_full.mat() * ideal_full_)(0, 0).real();

    if (opts_.keep_records) {
        std::sort(kept.begin(), kept.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [idx, rec] : kept) records.push_back(std::move(rec));
    }
    return EnsembleResult{n_rep, std::move(rho_tilde), error, sched_.expected_total_time(),
                          fidelity, std::move(records)};
}

RunRecord run_single(const QlspInstance& inst, const Schedule& sched, Embedding mode,
                     std::uint64_t derived_seed) {
    EngineOptions opts;
    opts.mode = mode;
    return Engine(inst, sched, opts).run_single(derived_seed);
}

EnsembleResult run_ensemble(const QlspInstance& inst, const Schedule& sched, int n_rep,
                            std::uint64_t master_seed, const EngineOptions& opts) {
    return Engine(inst, sched, opts).run_ensemble(n_rep, master_seed);
}

std::pair<std::vector<double>, double> ideal_measurement_trace(const QlspInstance& inst,
                                                               const Schedule& sched,
                                                               Embedding mode) {
    std::vector<double> fidelities;
    fidelities.reserve(sched.points.size());
    double success = 1.0;
    Vec prev = eigenpath_state(inst, 0.0, mode).vec();
    for (const auto& p : sched.points) {
        const Vec cur = eigenpath_state(inst, p.s, mode).vec();
        const double f = std::norm(prev.dot(cur));
        fidelities.push_back(f);
        success *= f;
        prev = cur;
    }
    return {std::move(fidelities), success};
}

SweepResult error_vs_q_sweep(const QlspInstance& inst, const std::vector<int>& q_list,
                             Family variant, int n_rep, std::uint64_t master_seed,
                             const EngineOptions& opts) {
    if (q_list.empty()) {
        throw ValidationError("error_vs_q_sweep: q list is empty");
    }
    for (size_t k = 0; k + 1 < q_list.size(); ++k) {
        if (q_list[k] >= q_list[k + 1]) {
            throw ValidationError("error_vs_q_sweep: q list must be strictly ascending");
        }
    }
    SweepResult rows;
    rows.reserve(q_list.size());
    for (int q : q_list) {
        const Schedule sched = build_schedule_with_q(inst.kappa, q, variant);
        Engine engine(inst, sched, opts);
        const EnsembleResult res =
            engine.run_ensemble(n_rep, mix_seed(master_seed, static_cast<std::uint64_t>(q)));
        rows.push_back(SweepRow{q, res.error, 1.0 / res.error, res.total_expected_time, variant,
                                inst.kappa, inst.n, inst.d, n_rep, master_seed});
    }
    return rows;
}

} // namespace rmls
