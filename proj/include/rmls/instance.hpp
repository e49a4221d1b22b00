#pragma once

#include <cstdint>
#include <filesystem>

#include "rmls/linalg.hpp"
#include "rmls/rng.hpp"

namespace rmls {

struct GeneratorConfig {
    int n = 2;                   // qubit count, N = 2^n
    int d = 2;                   // row sparsity bound
    double kappa_target = 0.0;   // 0 disables post-selection
    double kappa_tol = 1e-3;
    int b_sparsity = 2;
    long max_attempts = 2000000;
    std::uint64_t seed = 0;
};

/// A linear-system instance: Hermitian A with spectral norm 1, at most d
/// nonzeros per row, invertible; unit vector b; cached condition number.
struct QlspInstance {
    int n;
    int d;
    int b_sparsity;
    std::uint64_t seed;
    long attempts; // post-selection attempts consumed by the generator
    double kappa;
    HermitianMatrix A;
    StateVector b;

    Eigen::Index dim() const { return A.dim(); }
};

/// Validate invariants and assemble an instance (kappa is recomputed).
QlspInstance make_instance(HermitianMatrix A, StateVector b, int d, int b_sparsity,
                           std::uint64_t seed = 0, long attempts = 0);

/// Random Hermitian with a symmetric sparsity pattern of at most d nonzeros
/// per row, entries uniform in the complex square [-1,1]^2, symmetrized and
/// normalized to spectral norm 1. Retries internally on singular draws.
HermitianMatrix random_sparse_hermitian(const GeneratorConfig& cfg, Rng& rng);

/// Unit vector with exactly b_sparsity nonzero amplitudes at uniformly random
/// positions.
StateVector random_sparse_b(int n, int b_sparsity, Rng& rng);

/// Rejection-sample instances until |kappa - kappa_target| <= kappa_tol
/// (or first draw when kappa_target == 0). Attempt k uses the derived seed
/// mix_seed(cfg.seed, k), so attempts could run in parallel; the accepted
/// instance is the lowest attempt index. Throws when max_attempts is
/// exhausted, reporting the closest kappa reached.
QlspInstance generate_with_kappa(const GeneratorConfig& cfg);

/// Normalized A^-1 b via pivoted dense solve; unnormalized residual must
/// come out below 1e-9.
StateVector exact_solution(const QlspInstance& inst);

/// Plain-text `.qlsp` serialization: header, upper-triangle COO triplets of
/// A, then the amplitudes of b, all with 17 significant digits.
void save_instance(const QlspInstance& inst, const std::filesystem::path& path);
QlspInstance load_instance(const std::filesystem::path& path);

} // namespace rmls
