#pragma once

#include "rmls/instance.hpp"
#include "rmls/linalg.hpp"

namespace rmls {

/// How A is embedded into an always-invertible interpolation A(s).
/// General doubles the dimension with one ancilla qubit; PositiveDefinite
/// interpolates directly and is valid only for A > 0.
enum class Embedding { General, PositiveDefinite };

/// GroundState tracks the zero eigenstate of the frustration-free family;
/// GapAmplified tracks the degenerate zero subspace of its off-diagonal
/// square root, whose gap scales as the square root of the original.
enum class Family { GroundState, GapAmplified };

const char* to_string(Embedding mode);
const char* to_string(Family family);

struct HamiltonianSlice {
    double s;
    Embedding mode;
    Family family;
    HermitianMatrix H;

    Eigen::Index dim() const { return H.dim(); }
};

/// Per-slice spectral diagnostics, all derived from one diagonalization.
/// For GroundState: gap is the second-smallest eigenvalue, psd_defect the
/// negative excursion of the spectrum, symmetry_defect the hermiticity
/// defect. For GapAmplified: gap is the smallest nonzero |eigenvalue|,
/// psd_defect the worst mismatch of the +-pairing of the spectrum, and
/// symmetry_defect the entrywise defect of anticommutation with Z on the
/// leading ancilla.
struct SpectralReport {
    double s;
    int kernel_dim;
    double gap;
    double gap_bound;
    double symmetry_defect;
    double psd_defect;
};

/// Kernel/nonkernel threshold: eigenvalues below 1e-7 * max|eigenvalue|
/// count as kernel.
double kernel_threshold(const Eigen::VectorXd& eigenvalues);

Mat kron(const Mat& a, const Mat& b);

/// The interpolated operator A(s); invertible for every s in [0,1].
HermitianMatrix embed_A(const HermitianMatrix& A, double s, Embedding mode);

/// The embedded source state: |+> (x) |b> for General, b itself for
/// PositiveDefinite.
StateVector barred_b(const StateVector& b, Embedding mode);

/// Frustration-free family A(s) P_perp A(s) with P_perp projecting off the
/// embedded source state; PSD with a one-dimensional kernel.
HamiltonianSlice build_H(const QlspInstance& inst, double s, Embedding mode);

/// Gap-amplified family: one more ancilla, off-diagonal blocks A(s) P_perp
/// and its adjoint. Nonzero eigenvalues come in pairs +-sqrt(gamma) for each
/// nonzero eigenvalue gamma of the GroundState family.
HamiltonianSlice build_Hprime(const QlspInstance& inst, double s, Embedding mode);

/// Normalized A(s)^-1 |barred b|, computed with a pivoted dense solve
/// (accurate near s = 1 where conditioning reaches kappa).
StateVector eigenpath_state(const QlspInstance& inst, double s, Embedding mode);

/// Certified lower bound (1-s)^2 + (s/kappa)^2 on the GroundState gap; the
/// GapAmplified gap is bounded by its square root.
double gap_lower_bound(double s, double kappa);

SpectralReport spectral_report(const QlspInstance& inst, double s, Embedding mode, Family family);

/// max |<0, x(s_i)| H'(s_j) |1, barred b>| over a grid x grid lattice of
/// (s_i, s_j); zero in exact arithmetic, which is what forbids transitions
/// between the two degenerate kernel states.
double no_transition_defect(const QlspInstance& inst, Embedding mode, int grid);

/// max entrywise defect of (H')^2 against the block diagonal of H and
/// P_perp A(s)^2 P_perp.
double block_square_defect(const QlspInstance& inst, double s, Embedding mode);

/// Worst mismatch between the sorted spectra of B^dagger B and B B^dagger,
/// B = A(s) P_perp.
double isospectral_defect(const QlspInstance& inst, double s, Embedding mode);

} // namespace rmls
