#include "rmls/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmls/format.hpp"

namespace rmls {

namespace {

void check_kappa(double kappa) {
    if (!(kappa >= 1.0)) {
        throw ValidationError("schedule: kappa = " + fmt17(kappa) + " must be >= 1");
    }
}

} // namespace

double Schedule::expected_total_time() const {
    double total = 0.0;
    for (const auto& p : points) total += 0.5 * p.time_width;
    return total;
}

std::pair<double, double> v_bounds(double kappa) {
    check_kappa(kappa);
    const double root = std::sqrt(1.0 + kappa * kappa);
    const double pref = std::numbers::sqrt2 * kappa / root;
    // The lower endpoint's log argument kappa*root - kappa^2 is rewritten as
    // kappa/(root + kappa) to avoid cancellation at large kappa.
    const double v_a = pref * std::log(kappa / (root + kappa));
    const double v_b = pref * std::log(root + 1.0);
    return {v_a, v_b};
}

double s_of_v(double v, double kappa) {
    check_kappa(kappa);
    const auto [v_a, v_b] = v_bounds(kappa);
    if (!(v >= v_a - 1e-9 && v <= v_b + 1e-9)) {
        throw ValidationError("s_of_v: v = " + fmt17(v) + " outside [" + fmt17(v_a) + ", " +
                              fmt17(v_b) + "]");
    }
    const double k2 = kappa * kappa;
    const double alpha = std::sqrt(1.0 + k2) / (std::numbers::sqrt2 * kappa);
    return (std::exp(v * alpha) + 2.0 * k2 - k2 * std::exp(-v * alpha)) / (2.0 * (1.0 + k2));
}

double path_length_bound(double kappa) {
    check_kappa(kappa);
    const double lstar = std::numbers::sqrt2 * std::log(12.0 * kappa);
    const auto [v_a, v_b] = v_bounds(kappa);
    if (!(v_b - v_a <= lstar + 1e-12)) {
        throw PropertyViolation("path_length_bound: v_b - v_a = " + fmt17(v_b - v_a) +
                                " exceeds L* = " + fmt17(lstar));
    }
    return lstar;
}

int num_steps(double kappa, double epsilon, double C_q) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("num_steps: epsilon = " + fmt17(epsilon) + " must be in (0, 1)");
    }
    if (!(C_q > 0.0)) {
        throw ValidationError("num_steps: C_q must be positive");
    }
    const double lstar = path_length_bound(kappa);
    const double q = std::ceil(C_q * lstar * lstar / epsilon);
    if (!(q < 2e9)) {
        throw ValidationError("num_steps: q = " + fmt17(q) + " overflows the step budget");
    }
    return std::max(1, static_cast<int>(q));
}

Schedule build_schedule(double kappa, double epsilon, Family variant, double C_q) {
    const int q = num_steps(kappa, epsilon, C_q);
    Schedule sched = build_schedule_with_q(kappa, q, variant);
    sched.epsilon = epsilon;
    sched.C_q = C_q;
    return sched;
}

Schedule build_schedule_with_q(double kappa, int q, Family variant) {
    check_kappa(kappa);
    if (q < 1) {
        throw ValidationError("build_schedule: q = " + std::to_string(q) + " must be >= 1");
    }
    const auto [v_a, v_b] = v_bounds(kappa);
    const double delta = (v_b - v_a) / q;

    Schedule sched{kappa, 0.0, variant, q, v_a, v_b, delta, 1.0, {}};
    sched.points.reserve(static_cast<size_t>(q));
    double prev_s = 0.0;
    for (int j = 1; j <= q; ++j) {
        const double v = j == q ? v_b : v_a + j * delta;
        const double s = std::clamp(s_of_v(v, kappa), 0.0, 1.0);
        if (!(s > prev_s)) {
            throw PropertyViolation("build_schedule: s grid not strictly increasing at step " +
                                    std::to_string(j));
        }
        prev_s = s;
        const double bound = gap_lower_bound(s, kappa);
        const double width = variant == Family::GroundState
                                 ? 2.0 * std::numbers::pi / bound
                                 : 2.0 * std::numbers::pi / std::sqrt(bound);
        sched.points.push_back(SchedulePoint{v, s, bound, width});
    }
    if (!(std::abs(sched.points.back().s - 1.0) <= 1e-12)) {
        throw PropertyViolation("build_schedule: final s = " + fmt17(sched.points.back().s) +
                                " is not 1");
    }
    return sched;
}

std::vector<double> sample_times(const Schedule& sched, Rng& rng) {
    std::vector<double> times;
    times.reserve(sched.points.size());
    for (const auto& p : sched.points) {
        times.push_back(rng.uniform(0.0, p.time_width));
    }
    return times;
}

double total_time_bound(double kappa, double delta, Family variant) {
    check_kappa(kappa);
    if (!(delta > 0.0)) {
        throw ValidationError("total_time_bound: delta must be positive");
    }
    const double k2 = kappa * kappa;
    if (variant == Family::GroundState) {
        return std::numbers::pi * (std::numbers::sqrt2 * kappa * (1.0 + kappa) / delta + 2.0 * (k2 + 1.0));
    }
    return std::numbers::pi *
           (std::numbers::pi * kappa / (std::numbers::sqrt2 * delta) + 2.0 * std::sqrt(k2 + 1.0));
}

GateCostModel gate_cost_estimate(double T, int d, double epsilon) {
    if (!(T >= 1.0) || d < 1) {
        throw ValidationError("gate_cost_estimate: need T >= 1 and d >= 1");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("gate_cost_estimate: epsilon must be in (0, 1)");
    }
    const double ln2 = std::numbers::ln2;
    // Weight sum of the 32-term unitary decomposition is 2(d+1); segments are
    // sized for exposure ln(2) each, and K is the smallest Taylor order whose
    // tail (ln 2)^(K+1)/(K+1)! fits within the per-segment error budget.
    const double tau = 2.0 * (d + 1) * T;
    const auto r = static_cast<long long>(std::ceil(tau / ln2));
    const double target = epsilon / static_cast<double>(r);
    int K = 1;
    double tail = ln2 * ln2 / 2.0;
    while (tail > target) {
        ++K;
        tail *= ln2 / (K + 1);
    }
    return GateCostModel{T, d, epsilon, tau, K, r, 2 * r * static_cast<long long>(K)};
}

} // namespace rmls
