#include "rmls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rmls/format.hpp"

namespace rmls {

Tolerances& tolerances() {
    static Tolerances t;
    return t;
}

double hermiticity_defect(const Mat& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianMatrix::HermitianMatrix(Mat m) : HermitianMatrix(std::move(m), tolerances().hermiticity) {}

HermitianMatrix::HermitianMatrix(Mat m, double tol) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw ValidationError("HermitianMatrix: expected square matrix of dim >= 1, got " +
                              std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
    const double defect = hermiticity_defect(m_);
    if (!(defect <= tol)) {
        throw ValidationError("HermitianMatrix: max asymmetry |M - M^H| = " + fmt17(defect) +
                              " exceeds tolerance " + fmt17(tol));
    }
}

StateVector::StateVector(Vec v) : StateVector(std::move(v), tolerances().unit_norm) {}

StateVector::StateVector(Vec v, double tol) : v_(std::move(v)) {
    if (v_.size() < 1) {
        throw ValidationError("StateVector: dimension must be >= 1");
    }
    const double norm = v_.norm();
    if (!(std::abs(norm - 1.0) <= tol)) {
        throw ValidationError("StateVector: norm = " + fmt17(norm) + " is not 1 within " + fmt17(tol));
    }
}

DensityMatrix::DensityMatrix(Mat m) : m_(std::move(m)) {
    const auto& tol = tolerances();
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw ValidationError("DensityMatrix: expected square matrix of dim >= 1");
    }
    const double herm = hermiticity_defect(m_);
    if (!(herm <= tol.hermiticity)) {
        throw ValidationError("DensityMatrix: hermiticity defect " + fmt17(herm));
    }
    const double tr = m_.trace().real();
    if (!(std::abs(tr - 1.0) <= tol.trace_one)) {
        throw ValidationError("DensityMatrix: trace = " + fmt17(tr) + " is not 1 within " +
                              fmt17(tol.trace_one));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (!(min_eig >= -tol.psd_floor)) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + fmt17(min_eig));
    }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.vec() * psi.vec().adjoint());
}

EigenSystem eigh(const HermitianMatrix& M) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(M.mat());
    if (solver.info() != Eigen::Success) {
        throw PropertyViolation("eigh: eigensolver failed to converge at dim " +
                                std::to_string(M.dim()));
    }
    return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

StateVector evolve(const StateVector& psi, const EigenSystem& es, double t) {
    if (es.eigenvectors.rows() != psi.dim()) {
        throw ValidationError("evolve: dimension mismatch, state " + std::to_string(psi.dim()) +
                              " vs operator " + std::to_string(es.eigenvectors.rows()));
    }
    if (t < 0.0) {
        throw ValidationError("evolve: negative time t = " + fmt17(t));
    }
    Vec coeff = es.eigenvectors.adjoint() * psi.vec();
    coeff.array() *= (es.eigenvalues.array().cast<Complex>() * Complex(0.0, -t)).exp();
    return StateVector(es.eigenvectors * coeff);
}

StateVector evolve(const StateVector& psi, const HermitianMatrix& H, double t) {
    if (H.dim() != psi.dim()) {
        throw ValidationError("evolve: dimension mismatch, state " + std::to_string(psi.dim()) +
                              " vs operator " + std::to_string(H.dim()));
    }
    return evolve(psi, eigh(H), t);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw ValidationError("trace_distance: dimension mismatch " + std::to_string(rho.dim()) +
                              " vs " + std::to_string(sigma.dim()));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.mat() - sigma.mat(), Eigen::EigenvaluesOnly);
    const double d = 0.5 * es.eigenvalues().cwiseAbs().sum();
    return std::clamp(d, 0.0, 1.0);
}

DensityMatrix partial_trace_leading_qubits(const DensityMatrix& rho, int ancilla_qubits) {
    if (ancilla_qubits < 0) {
        throw ValidationError("partial_trace: negative qubit count");
    }
    const Eigen::Index dim = rho.dim();
    if (ancilla_qubits >= 62 || (Eigen::Index(1) << ancilla_qubits) > dim) {
        throw ValidationError("partial_trace: cannot trace " + std::to_string(ancilla_qubits) +
                              " qubits out of dim " + std::to_string(dim));
    }
    const Eigen::Index blocks = Eigen::Index(1) << ancilla_qubits;
    if (dim % blocks != 0) {
        throw ValidationError("partial_trace: dim " + std::to_string(dim) +
                              " not divisible by 2^" + std::to_string(ancilla_qubits));
    }
    const Eigen::Index sub = dim / blocks;
    Mat out = Mat::Zero(sub, sub);
    for (Eigen::Index a = 0; a < blocks; ++a) {
        out += rho.mat().block(a * sub, a * sub, sub, sub);
    }
    return DensityMatrix(std::move(out));
}

double condition_number(const HermitianMatrix& A) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A.mat(), Eigen::EigenvaluesOnly);
    const auto abs_eigs = es.eigenvalues().cwiseAbs();
    const double lo = abs_eigs.minCoeff();
    const double hi = abs_eigs.maxCoeff();
    if (!(lo > tolerances().singular)) {
        throw ValidationError("condition_number: matrix is singular within tolerance, min |eigenvalue| = " +
                              fmt17(lo));
    }
    return hi / lo;
}

} // namespace rmls
