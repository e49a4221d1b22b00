#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rmls/instance.hpp"
#include "rmls/schedule.hpp"

namespace rmls {

struct RunRecord {
    int rep_index;
    std::uint64_t derived_seed;
    std::vector<double> sampled_times;
    StateVector final_state; // full space, ancillas included
};

struct EnsembleResult {
    int n_rep;
    DensityMatrix rho_tilde; // system register only, ancillas traced out
    double error;            // trace distance to the exact solution projector
    double total_expected_time;
    double full_fidelity;    // diagnostic: overlap of the full-space average with the ideal final state
    std::vector<RunRecord> records; // populated only when keep_records is set
};

struct SweepRow {
    int q;
    double error;
    double inv_error;
    double expected_time;
    Family variant;
    double kappa;
    int n;
    int d;
    int n_rep;
    std::uint64_t master_seed;
};

using SweepResult = std::vector<SweepRow>;

struct EngineOptions {
    Embedding mode = Embedding::General;
    int threads = 0; // 0 = hardware concurrency
    bool keep_records = false;
    double kappa_ceiling = 1e4;
};

/// Executes the randomized-evolution algorithm on one instance/schedule pair.
/// Every slice is diagonalized once up front and shared across repetitions;
/// repetitions draw their seeds as mix_seed(master, rep_index), so results
/// are bit-reproducible for any worker count.
class Engine {
public:
    Engine(QlspInstance inst, Schedule sched, EngineOptions opts = {});

    const QlspInstance& instance() const { return inst_; }
    const Schedule& schedule() const { return sched_; }
    int ancilla_qubits() const { return ancillas_; }

    RunRecord run_single(std::uint64_t derived_seed, int rep_index = 0) const;

    /// Test hook: run with explicitly supplied evolution times.
    RunRecord run_with_times(std::vector<double> times, std::uint64_t seed_label = 0,
                             int rep_index = 0) const;

    EnsembleResult run_ensemble(int n_rep, std::uint64_t master_seed) const;

private:
    QlspInstance inst_;
    Schedule sched_;
    EngineOptions opts_;
    std::vector<EigenSystem> cache_; // one decomposition per schedule point
    Vec initial_;
    Vec ideal_full_;
    int ancillas_;
};

RunRecord run_single(const QlspInstance& inst, const Schedule& sched, Embedding mode,
                     std::uint64_t derived_seed);

EnsembleResult run_ensemble(const QlspInstance& inst, const Schedule& sched, int n_rep,
                            std::uint64_t master_seed, const EngineOptions& opts = {});

/// Fidelities |<x(s_j)|x(s_j+1)>|^2 along the discretized eigenpath starting
/// from s = 0, and their product: the success probability of the idealized
/// projective-measurement sequence the randomization simulates.
std::pair<std::vector<double>, double> ideal_measurement_trace(const QlspInstance& inst,
                                                               const Schedule& sched,
                                                               Embedding mode);

/// One ensemble per q in q_list (ascending), each with schedule built for
/// that explicit q and master seed mix_seed(master_seed, q).
SweepResult error_vs_q_sweep(const QlspInstance& inst, const std::vector<int>& q_list,
                             Family variant, int n_rep, std::uint64_t master_seed,
                             const EngineOptions& opts = {});

/// Run fn(0..n-1) across a worker pool; any exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace rmls
