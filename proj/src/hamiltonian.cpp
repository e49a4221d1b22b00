#include "rmls/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rmls/format.hpp"

namespace rmls {

namespace {

void check_s(double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw ValidationError("hamiltonian: s = " + fmt17(s) + " outside [0, 1]");
    }
}

Mat pauli_x() {
    Mat x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

Mat pauli_z() {
    Mat z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

Mat perp_projector(const Vec& v) {
    return Mat::Identity(v.size(), v.size()) - v * v.adjoint();
}

} // namespace

const char* to_string(Embedding mode) {
    return mode == Embedding::General ? "general" : "positive";
}

const char* to_string(Family family) {
    return family == Family::GroundState ? "ground" : "amplified";
}

double kernel_threshold(const Eigen::VectorXd& eigenvalues) {
    return 1e-7 * eigenvalues.cwiseAbs().maxCoeff();
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

HermitianMatrix embed_A(const HermitianMatrix& A, double s, Embedding mode) {
    check_s(s);
    const Eigen::Index N = A.dim();
    if (mode == Embedding::PositiveDefinite) {
        Eigen::SelfAdjointEigenSolver<Mat> es(A.mat(), Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (!(min_eig > tolerances().singular)) {
            throw ValidationError("embed_A: positive-definite embedding requires A > 0, "
                                  "min eigenvalue = " + fmt17(min_eig));
        }
        return HermitianMatrix((1.0 - s) * Mat::Identity(N, N) + s * A.mat());
    }
    return HermitianMatrix((1.0 - s) * kron(pauli_z(), Mat::Identity(N, N)) +
                           s * kron(pauli_x(), A.mat()));
}

StateVector barred_b(const StateVector& b, Embedding mode) {
    if (mode == Embedding::PositiveDefinite) return b;
    Vec out(2 * b.dim());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    out.head(b.dim()) = inv_sqrt2 * b.vec();
    out.tail(b.dim()) = inv_sqrt2 * b.vec();
    return StateVector(out);
}

HamiltonianSlice build_H(const QlspInstance& inst, double s, Embedding mode) {
    const Mat As = embed_A(inst.A, s, mode).mat();
    const Vec bb = barred_b(inst.b, mode).vec();
    Mat H = As * perp_projector(bb) * As;
    return HamiltonianSlice{s, mode, Family::GroundState, HermitianMatrix(std::move(H))};
}

HamiltonianSlice build_Hprime(const QlspInstance& inst, double s, Embedding mode) {
    const Mat As = embed_A(inst.A, s, mode).mat();
    const Vec bb = barred_b(inst.b, mode).vec();
    const Mat AsP = As * perp_projector(bb);
    const Eigen::Index D = As.rows();
    Mat Hp = Mat::Zero(2 * D, 2 * D);
    Hp.topRightCorner(D, D) = AsP;            // sigma+ block (new ancilla leading)
    Hp.bottomLeftCorner(D, D) = AsP.adjoint();
    return HamiltonianSlice{s, mode, Family::GapAmplified, HermitianMatrix(std::move(Hp))};
}

StateVector eigenpath_state(const QlspInstance& inst, double s, Embedding mode) {
    const Mat As = embed_A(inst.A, s, mode).mat();
    const Vec bb = barred_b(inst.b, mode).vec();
    const Vec y = As.fullPivLu().solve(bb);
    return StateVector(y / y.norm());
}

double gap_lower_bound(double s, double kappa) {
    check_s(s);
    if (!(kappa >= 1.0)) {
        throw ValidationError("gap_lower_bound: kappa = " + fmt17(kappa) + " must be >= 1");
    }
    return (1.0 - s) * (1.0 - s) + (s / kappa) * (s / kappa);
}

SpectralReport spectral_report(const QlspInstance& inst, double s, Embedding mode, Family family) {
    const HamiltonianSlice slice =
        family == Family::GroundState ? build_H(inst, s, mode) : build_Hprime(inst, s, mode);
    const EigenSystem es = eigh(slice.H);
    const auto& eigs = es.eigenvalues;
    const Eigen::Index D = eigs.size();
    const double thresh = kernel_threshold(eigs);

    int kernel_dim = 0;
    for (Eigen::Index k = 0; k < D; ++k) {
        if (std::abs(eigs[k]) <= thresh) ++kernel_dim;
    }

    SpectralReport rep;
    rep.s = s;
    rep.kernel_dim = kernel_dim;
    if (family == Family::GroundState) {
        rep.gap = eigs[1]; // second-smallest eigenvalue
        rep.gap_bound = gap_lower_bound(s, inst.kappa);
        rep.symmetry_defect = hermiticity_defect(slice.H.mat());
        rep.psd_defect = std::max(0.0, -eigs.minCoeff());
    } else {
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < D; ++k) {
            const double a = std::abs(eigs[k]);
            if (a > thresh) gap = std::min(gap, a);
        }
        rep.gap = gap;
        rep.gap_bound = std::sqrt(gap_lower_bound(s, inst.kappa));
        const Mat Zc = kron(pauli_z(), Mat::Identity(D / 2, D / 2));
        rep.symmetry_defect = (Zc * slice.H.mat() * Zc + slice.H.mat()).cwiseAbs().maxCoeff();
        double pairing = 0.0;
        for (Eigen::Index k = 0; k < D; ++k) {
            pairing = std::max(pairing, std::abs(eigs[k] + eigs[D - 1 - k]));
        }
        rep.psd_defect = pairing;
    }
    return rep;
}

double no_transition_defect(const QlspInstance& inst, Embedding mode, int grid) {
    if (grid < 2) {
        throw ValidationError("no_transition_defect: grid must have at least 2 points");
    }
    const Vec bb = barred_b(inst.b, mode).vec();
    const Eigen::Index D = bb.size();
    Vec ket(2 * D);  // |1> (x) |barred b|
    ket.setZero();
    ket.tail(D) = bb;

    std::vector<Vec> applied(static_cast<size_t>(grid));
    for (int j = 0; j < grid; ++j) {
        const double s = static_cast<double>(j) / (grid - 1);
        applied[j] = build_Hprime(inst, s, mode).H.mat() * ket;
    }

    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double s = static_cast<double>(i) / (grid - 1);
        Vec bra(2 * D); // |0> (x) |x(s)>
        bra.setZero();
        bra.head(D) = eigenpath_state(inst, s, mode).vec();
        for (int j = 0; j < grid; ++j) {
            worst = std::max(worst, std::abs(bra.dot(applied[j])));
        }
    }
    return worst;
}

double block_square_defect(const QlspInstance& inst, double s, Embedding mode) {
    const Mat As = embed_A(inst.A, s, mode).mat();
    const Vec bb = barred_b(inst.b, mode).vec();
    const Mat P = perp_projector(bb);
    const Mat H = build_H(inst, s, mode).H.mat();
    const Mat Hp = build_Hprime(inst, s, mode).H.mat();
    const Eigen::Index D = As.rows();

    Mat expected = Mat::Zero(2 * D, 2 * D);
    expected.topLeftCorner(D, D) = H;
    expected.bottomRightCorner(D, D) = P * As * As * P;
    return (Hp * Hp - expected).cwiseAbs().maxCoeff();
}

double isospectral_defect(const QlspInstance& inst, double s, Embedding mode) {
    const Mat As = embed_A(inst.A, s, mode).mat();
    const Vec bb = barred_b(inst.b, mode).vec();
    const Mat P = perp_projector(bb);
    const Mat B = As * P;

    // B B^dagger is the GroundState family, B^dagger B its partner block;
    // both are PSD with a one-dimensional kernel, so full sorted spectra
    // must agree.
    Eigen::SelfAdjointEigenSolver<Mat> left(B * B.adjoint(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> right(B.adjoint() * B, Eigen::EigenvaluesOnly);
    return (left.eigenvalues() - right.eigenvalues()).cwiseAbs().maxCoeff();
}

} // namespace rmls
