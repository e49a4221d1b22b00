#pragma once

#include <Eigen/Dense>
#include <complex>

#include "rmls/errors.hpp"

namespace rmls {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Default numeric tolerances. The algebra behind every check is exact,
/// so a violation indicates a bug rather than model error; values can be
/// tightened or relaxed programmatically for experiments.
struct Tolerances {
    double hermiticity = 1e-12;
    double unit_norm = 1e-10;
    double trace_one = 1e-10;
    double psd_floor = 1e-10; // allowed negative excursion of density-matrix eigenvalues
    double singular = 1e-12;  // invertibility threshold on |eigenvalue|
};

/// Mutable global defaults (configuration override point).
Tolerances& tolerances();

/// Max entrywise |M - M^dagger|.
double hermiticity_defect(const Mat& m);

/// Square complex matrix validated Hermitian on construction.
class HermitianMatrix {
public:
    explicit HermitianMatrix(Mat m);
    HermitianMatrix(Mat m, double tol);

    Eigen::Index dim() const { return m_.rows(); }
    const Mat& mat() const { return m_; }

private:
    Mat m_;
};

/// Complex vector validated unit-norm on construction.
class StateVector {
public:
    explicit StateVector(Vec v);
    StateVector(Vec v, double tol);

    Eigen::Index dim() const { return v_.size(); }
    const Vec& vec() const { return v_; }

private:
    Vec v_;
};

/// Hermitian, unit-trace, positive-semidefinite matrix (within tolerances).
class DensityMatrix {
public:
    explicit DensityMatrix(Mat m);

    static DensityMatrix pure(const StateVector& psi);

    Eigen::Index dim() const { return m_.rows(); }
    const Mat& mat() const { return m_; }

private:
    Mat m_;
};

/// Full spectral decomposition: eigenvalues ascending, matching orthonormal
/// column eigenvectors.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;
    Mat eigenvectors;
};

/// Dense Hermitian eigendecomposition.
EigenSystem eigh(const HermitianMatrix& M);

/// exp(-i H t) |psi>, evaluated through the spectral decomposition.
StateVector evolve(const StateVector& psi, const HermitianMatrix& H, double t);

/// Same, reusing a precomputed decomposition of H.
StateVector evolve(const StateVector& psi, const EigenSystem& es, double t);

/// (1/2) sum |eigenvalues(rho - sigma)|, clamped into [0, 1].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Trace out the leading `ancilla_qubits` tensor factors (qubit convention:
/// ancillas are the slowest-varying index). k = 0 is the identity map.
DensityMatrix partial_trace_leading_qubits(const DensityMatrix& rho, int ancilla_qubits);

/// max|eigenvalue| / min|eigenvalue|; rejects matrices singular within
/// tolerance, naming the offending eigenvalue magnitude.
double condition_number(const HermitianMatrix& A);

} // namespace rmls
