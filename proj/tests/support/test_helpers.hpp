#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rmls/instance.hpp"
#include "rmls/linalg.hpp"

namespace testutil {

// Recursive adaptive Simpson quadrature; independent oracle for the
// closed-form integrals in the schedule module.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 60) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Distance between unit vectors after aligning the global phase of y to
// maximize overlap with x.
inline double phase_aligned_distance(const rmls::Vec& x, const rmls::Vec& y) {
    const rmls::Complex z = x.dot(y);
    const double a = std::abs(z);
    if (a == 0.0) return (x - y).norm();
    return (x - y * (std::conj(z) / a)).norm();
}

struct LinearFit {
    double slope;
    double intercept;
    double r2;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double fit = slope * xs[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    return {slope, intercept, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

// Random Hermitian built with std::mt19937 directly, so linalg tests do not
// depend on the instance generator they help validate.
inline rmls::Mat random_hermitian(Eigen::Index dim, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    rmls::Mat m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            m(i, j) = rmls::Complex(u(gen), u(gen));
        }
    }
    return rmls::Mat(0.5 * (m + m.adjoint()));
}

inline rmls::Vec random_state(Eigen::Index dim, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    rmls::Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rmls::Complex(u(gen), u(gen));
    return v / v.norm();
}

inline rmls::QlspInstance identity_instance(int n, unsigned b_seed = 7) {
    const Eigen::Index N = Eigen::Index(1) << n;
    return rmls::make_instance(rmls::HermitianMatrix(rmls::Mat::Identity(N, N)),
                               rmls::StateVector(random_state(N, b_seed)), 1,
                               static_cast<int>(N));
}

} // namespace testutil
