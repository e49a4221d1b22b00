#include "rmls/instance.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "rmls/format.hpp"

namespace rmls {

namespace {

constexpr double kSpectralNormTol = 1e-9;
constexpr double kSolveResidualTol = 1e-9;

int qubits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index(1) << n) < dim) ++n;
    if ((Eigen::Index(1) << n) != dim) {
        throw ValidationError("instance: dimension " + std::to_string(dim) + " is not a power of 2");
    }
    return n;
}

int max_row_nonzeros(const Mat& A) {
    int worst = 0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        int count = 0;
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (A(i, j) != Complex(0.0, 0.0)) ++count;
        }
        worst = std::max(worst, count);
    }
    return worst;
}

} // namespace

QlspInstance make_instance(HermitianMatrix A, StateVector b, int d, int b_sparsity,
                           std::uint64_t seed, long attempts) {
    const Eigen::Index N = A.dim();
    const int n = qubits_for_dim(N);
    if (b.dim() != N) {
        throw ValidationError("instance: A is " + std::to_string(N) + "-dimensional but b has dim " +
                              std::to_string(b.dim()));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(A.mat(), Eigen::EigenvaluesOnly);
    const auto abs_eigs = es.eigenvalues().cwiseAbs();
    const double norm = abs_eigs.maxCoeff();
    if (!(std::abs(norm - 1.0) <= kSpectralNormTol)) {
        throw ValidationError("instance: spectral norm of A is " + fmt17(norm) + ", expected 1 within " +
                              fmt17(kSpectralNormTol));
    }
    const double min_abs = abs_eigs.minCoeff();
    if (!(min_abs > tolerances().singular)) {
        throw ValidationError("instance: A is singular within tolerance, min |eigenvalue| = " + fmt17(min_abs));
    }
    const int worst_row = max_row_nonzeros(A.mat());
    if (worst_row > d) {
        throw ValidationError("instance: a row of A has " + std::to_string(worst_row) +
                              " nonzeros, exceeding the sparsity bound d = " + std::to_string(d));
    }
    const double kappa = norm / min_abs;
    return QlspInstance{n, d, b_sparsity, seed, attempts, kappa, std::move(A), std::move(b)};
}

HermitianMatrix random_sparse_hermitian(const GeneratorConfig& cfg, Rng& rng) {
    const Eigen::Index N = Eigen::Index(1) << cfg.n;
    if (cfg.n < 1 || cfg.d < 1 || cfg.d > N) {
        throw ValidationError("random_sparse_hermitian: need 1 <= d <= 2^n, got n = " +
                              std::to_string(cfg.n) + ", d = " + std::to_string(cfg.d));
    }

    // Candidate upper-triangle positions in random order; greedily keep those
    // that fit the per-row capacity. Off-diagonal entries consume capacity in
    // both of their rows.
    std::vector<std::pair<int, int>> positions;
    positions.reserve(static_cast<size_t>(N) * (N + 1) / 2);

    for (int guard = 0; guard < 1000; ++guard) {
        positions.clear();
        for (int i = 0; i < N; ++i) {
            for (int j = i; j < N; ++j) positions.emplace_back(i, j);
        }
        for (size_t k = positions.size(); k > 1; --k) {
            std::swap(positions[k - 1], positions[rng.uniform_index(k)]);
        }

        Mat M = Mat::Zero(N, N);
        std::vector<int> cap(static_cast<size_t>(N), cfg.d);
        for (auto [i, j] : positions) {
            if (i == j) {
                if (cap[i] >= 1) {
                    cap[i] -= 1;
                    M(i, i) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                }
            } else if (cap[i] >= 1 && cap[j] >= 1) {
                cap[i] -= 1;
                cap[j] -= 1;
                M(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
                M(j, i) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            }
        }

        Mat A = 0.5 * (M + M.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
        const auto abs_eigs = es.eigenvalues().cwiseAbs();
        const double norm = abs_eigs.maxCoeff();
        if (norm <= 0.0) continue;
        if (!(abs_eigs.minCoeff() / norm > tolerances().singular)) continue; // singular draw
        return HermitianMatrix(A / norm);
    }
    throw PropertyViolation("random_sparse_hermitian: no invertible draw in 1000 tries");
}

StateVector random_sparse_b(int n, int b_sparsity, Rng& rng) {
    const Eigen::Index N = Eigen::Index(1) << n;
    if (n < 1 || b_sparsity < 1 || b_sparsity > N) {
        throw ValidationError("random_sparse_b: need 1 <= b_sparsity <= 2^n, got n = " +
                              std::to_string(n) + ", b_sparsity = " + std::to_string(b_sparsity));
    }
    std::vector<Eigen::Index> idx(static_cast<size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < b_sparsity; ++k) {
        std::swap(idx[k], idx[k + rng.uniform_index(static_cast<std::uint64_t>(N - k))]);
    }
    Vec b = Vec::Zero(N);
    for (int k = 0; k < b_sparsity; ++k) {
        Complex z;
        do {
            z = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        } while (z == Complex(0.0, 0.0));
        b[idx[k]] = z;
    }
    return StateVector(b / b.norm());
}

QlspInstance generate_with_kappa(const GeneratorConfig& cfg) {
    if (cfg.kappa_target != 0.0 && !(cfg.kappa_target >= 1.0)) {
        throw ValidationError("generate_with_kappa: kappa target must be >= 1 (or 0 for none)");
    }
    if (cfg.max_attempts < 1 || cfg.kappa_tol <= 0.0) {
        throw ValidationError("generate_with_kappa: need max_attempts >= 1 and kappa_tol > 0");
    }

    double best_kappa = std::numeric_limits<double>::quiet_NaN();
    double best_diff = std::numeric_limits<double>::infinity();
    for (long attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(attempt)));
        HermitianMatrix A = random_sparse_hermitian(cfg, rng);
        const double kappa = condition_number(A);
        const double diff = cfg.kappa_target == 0.0 ? 0.0 : std::abs(kappa - cfg.kappa_target);
        if (diff <= (cfg.kappa_target == 0.0 ? 0.0 : cfg.kappa_tol)) {
            Rng rng_b(mix_seed(cfg.seed, 0)); // stream 0 reserved for b
            StateVector b = random_sparse_b(cfg.n, cfg.b_sparsity, rng_b);
            return make_instance(std::move(A), std::move(b), cfg.d, cfg.b_sparsity, cfg.seed, attempt);
        }
        if (diff < best_diff) {
            best_diff = diff;
            best_kappa = kappa;
        }
    }
    throw ValidationError("generate_with_kappa: exhausted " + std::to_string(cfg.max_attempts) +
                          " attempts targeting kappa = " + fmt17(cfg.kappa_target) + " +- " +
                          fmt17(cfg.kappa_tol) + "; closest kappa reached was " + fmt17(best_kappa));
}

StateVector exact_solution(const QlspInstance& inst) {
    Eigen::FullPivLU<Mat> lu(inst.A.mat());
    if (!lu.isInvertible()) {
        throw ValidationError("exact_solution: A is numerically singular");
    }
    const Vec x_un = lu.solve(inst.b.vec());
    const double residual = (inst.A.mat() * x_un - inst.b.vec()).norm();
    if (!(residual <= kSolveResidualTol)) {
        throw PropertyViolation("exact_solution: residual " + fmt17(residual) + " exceeds " +
                                fmt17(kSolveResidualTol));
    }
    return StateVector(x_un / x_un.norm());
}

namespace {

struct LineReader {
    std::istream& in;
    const std::filesystem::path& path;
    int line_no = 0;

    std::string next(const char* what) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line[0] == '#') continue; // comments
            return line;
        }
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": unexpected end of file, expected " + std::string(what));
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    }
};

double parse_double(LineReader& r, std::istringstream& is, const char* field) {
    std::string tok;
    if (!(is >> tok)) r.fail(std::string("missing ") + field);
    try {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) r.fail(std::string("malformed ") + field + " '" + tok + "'");
        return v;
    } catch (const std::exception&) {
        r.fail(std::string("malformed ") + field + " '" + tok + "'");
    }
}

long long parse_int(LineReader& r, std::istringstream& is, const char* field) {
    std::string tok;
    if (!(is >> tok)) r.fail(std::string("missing ") + field);
    try {
        size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) r.fail(std::string("malformed ") + field + " '" + tok + "'");
        return v;
    } catch (const std::exception&) {
        r.fail(std::string("malformed ") + field + " '" + tok + "'");
    }
}

long long header_int(LineReader& r, const char* key) {
    std::istringstream is(r.next(key));
    std::string k;
    is >> k;
    if (k != key) r.fail("expected '" + std::string(key) + " <value>', got '" + k + "'");
    return parse_int(r, is, key);
}

double header_double(LineReader& r, const char* key) {
    std::istringstream is(r.next(key));
    std::string k;
    is >> k;
    if (k != key) r.fail("expected '" + std::string(key) + " <value>', got '" + k + "'");
    return parse_double(r, is, key);
}

} // namespace

void save_instance(const QlspInstance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("save_instance: cannot open '" + path.string() + "' for writing");
    }
    const Eigen::Index N = inst.dim();
    out << "# rmls qlsp instance\n";
    out << "format 1\n";
    out << "n " << inst.n << "\n";
    out << "d " << inst.d << "\n";
    out << "b-sparsity " << inst.b_sparsity << "\n";
    out << "seed " << inst.seed << "\n";
    out << "attempts " << inst.attempts << "\n";
    out << "kappa " << fmt17(inst.kappa) << "\n";

    std::vector<std::pair<Eigen::Index, Eigen::Index>> nz;
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = i; j < N; ++j) {
            if (inst.A.mat()(i, j) != Complex(0.0, 0.0)) nz.emplace_back(i, j);
        }
    }
    out << "A " << nz.size() << "\n";
    for (auto [i, j] : nz) {
        const Complex z = inst.A.mat()(i, j);
        out << i << " " << j << " " << fmt17(z.real()) << " " << fmt17(z.imag()) << "\n";
    }
    out << "b " << N << "\n";
    for (Eigen::Index i = 0; i < N; ++i) {
        const Complex z = inst.b.vec()[i];
        out << fmt17(z.real()) << " " << fmt17(z.imag()) << "\n";
    }
    if (!out) {
        throw IoError("save_instance: write failed for '" + path.string() + "'");
    }
}

QlspInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("load_instance: cannot open '" + path.string() + "'");
    }
    LineReader r{in, path};

    if (header_int(r, "format") != 1) r.fail("unsupported format version");
    const int n = static_cast<int>(header_int(r, "n"));
    const int d = static_cast<int>(header_int(r, "d"));
    const int b_sparsity = static_cast<int>(header_int(r, "b-sparsity"));
    const auto seed = static_cast<std::uint64_t>(header_int(r, "seed"));
    const long attempts = static_cast<long>(header_int(r, "attempts"));
    const double kappa_file = header_double(r, "kappa");
    if (n < 1 || n > 24) r.fail("qubit count n out of range");
    const Eigen::Index N = Eigen::Index(1) << n;

    const auto nnz = header_int(r, "A");
    if (nnz < 0 || nnz > N * (N + 1) / 2) r.fail("bad triplet count");
    Mat A = Mat::Zero(N, N);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(N, N);
    for (long long k = 0; k < nnz; ++k) {
        std::istringstream is(r.next("triplet"));
        const auto i = parse_int(r, is, "row");
        const auto j = parse_int(r, is, "col");
        const double re = parse_double(r, is, "re");
        const double im = parse_double(r, is, "im");
        if (i < 0 || j < 0 || i >= N || j >= N) r.fail("triplet index out of range");
        if (i > j) r.fail("triplet below the diagonal (upper triangle expected)");
        if (seen(i, j)++) r.fail("duplicate triplet");
        if (i == j && !(std::abs(im) <= tolerances().hermiticity)) {
            r.fail("non-Hermitian entry: diagonal element with imaginary part " + fmt17(im));
        }
        A(i, j) = Complex(re, im);
        if (i != j) A(j, i) = std::conj(Complex(re, im));
    }

    if (header_int(r, "b") != N) r.fail("b length does not match 2^n");
    Vec b(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        std::istringstream is(r.next("b amplitude"));
        const double re = parse_double(r, is, "re");
        const double im = parse_double(r, is, "im");
        b[i] = Complex(re, im);
    }

    QlspInstance inst = make_instance(HermitianMatrix(std::move(A)), StateVector(std::move(b)),
                                      d, b_sparsity, seed, attempts);
    if (!(std::abs(kappa_file - inst.kappa) <= 1e-6 * std::max(1.0, inst.kappa))) {
        throw ValidationError(path.string() + ": kappa field " + fmt17(kappa_file) +
                              " does not match recomputed kappa " + fmt17(inst.kappa));
    }
    inst.kappa = kappa_file; // keep the stored value so save/load round-trips bytes
    return inst;
}

} // namespace rmls
