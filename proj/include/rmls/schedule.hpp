#pragma once

#include <utility>
#include <vector>

#include "rmls/hamiltonian.hpp"
#include "rmls/rng.hpp"

namespace rmls {

struct SchedulePoint {
    double v;
    double s;
    double gap_bound;  // certified lower bound on the relevant gap squared-or-not per family
    double time_width; // random evolution time is uniform in [0, time_width]
};

/// Discretization of the eigenpath in the natural parameter v, where the
/// eigenstate moves at unit speed. Points j = 1..q sit at v_a + j*delta with
/// delta = (v_b - v_a)/q, so the last point lands exactly on s = 1.
struct Schedule {
    double kappa;
    double epsilon; // 0 when the step count was given explicitly
    Family variant;
    int q;
    double v_a;
    double v_b;
    double delta;
    double C_q;
    std::vector<SchedulePoint> points;

    /// Sum of mean evolution times, width/2 per step.
    double expected_total_time() const;
};

/// Closed-form gate-cost model for simulating the total evolution by a
/// truncated-Taylor-series decomposition into 2(d+1)/tau-weight unitaries;
/// constants are pinned so the estimate is deterministic. The per-matrix-
/// element rotation cost is precision-dependent and stays symbolic (C_M).
struct GateCostModel {
    double T;
    int d;
    double epsilon;
    double tau;     // evolution time times the decomposition weight sum 2(d+1)
    int K;          // Taylor truncation order
    long long r;    // number of ln(2)-exposure segments
    long long queries;
};

/// The natural parametrization s(v): solves ds/dv = sqrt(gap_bound/2) with
/// s(v_a) = 0, s(v_b) = 1. Strictly increasing.
double s_of_v(double v, double kappa);

/// Domain endpoints (v_a, v_b) of the natural parametrization.
std::pair<double, double> v_bounds(double kappa);

/// Path-length upper bound sqrt(2) ln(12 kappa); also certifies that it
/// dominates v_b - v_a.
double path_length_bound(double kappa);

/// q = ceil(C_q * L*^2 / epsilon), at least 1.
int num_steps(double kappa, double epsilon, double C_q);

Schedule build_schedule(double kappa, double epsilon, Family variant, double C_q = 1.0);
Schedule build_schedule_with_q(double kappa, int q, Family variant);

/// One uniform draw t_j in [0, time_width_j] per step.
std::vector<double> sample_times(const Schedule& sched, Rng& rng);

/// Closed-form total-time bound for spacing delta:
///   GroundState:  pi [ sqrt(2) kappa (1+kappa) / delta + 2 (kappa^2 + 1) ]
///   GapAmplified: pi [ pi kappa / (sqrt(2) delta) + 2 sqrt(kappa^2 + 1) ]
double total_time_bound(double kappa, double delta, Family variant);

GateCostModel gate_cost_estimate(double T, int d, double epsilon);

} // namespace rmls
