#pragma once

#include <optional>
#include <vector>

#include "dosetc/dos_schedule.hpp"
#include "dosetc/observer.hpp"
#include "dosetc/plant.hpp"

namespace dosetc {

struct certification_order_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct record_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Controller gain, per-mode observer gains, Lyapunov matrices and the slack
/// scalars entering the dissipation inequalities. Mode vectors are indexed
/// 0-based for mode sigma = index + 1.
struct GainSet {
    Matrix k;                  // n_u x n_p
    std::vector<Matrix> l;     // n_p x n_y_sigma per mode
    std::vector<Matrix> p_p;   // n_p x n_p symmetric PD per mode
    std::vector<Matrix> p_e;   // n_p x n_p symmetric PD per mode
    double psi1 = 0.0;
    double psi2 = 0.0;
    std::vector<double> eps1;  // per mode, > 0
    std::vector<double> eps2;  // per mode, > 0
    std::vector<double> eps3;  // per mode; large values make their slack negligible
    std::vector<double> eps4;  // per mode

    std::size_t mode_count() const { return l.size(); }
    /// Shape/positivity checks plus the A - BK Hurwitz screen (via the
    /// Lyapunov solve, which throws no_solution_error on unstable loops).
    void validate(const PlantModel& plant) const;
};

/// Default for the eps3/eps4 slacks ("very high" in the source analysis, so
/// the corresponding quadratic terms are negligible).
constexpr double kDefaultEps34 = 1e6;

/// Dissipation matrix of the closed-loop/observer-error pair, 2n_p x 2n_p.
Matrix build_gamma1(const PlantModel& plant, const GainSet& gains, std::size_t mode);

/// The linearized 6-block form whose positive definiteness is the
/// certification LMI; block sizes (n_p, n_p, n_p, n_p, n_p, n_y_sigma).
Matrix build_gamma2(const PlantModel& plant, const GainSet& gains, std::size_t mode);

struct LmiReport {
    std::vector<double> lambda_min;  // per mode, of the 6-block matrix
    std::vector<bool> mode_pass;
    bool pass = false;
};

LmiReport verify_lmi(const PlantModel& plant, const GainSet& gains);

struct ModeRates {
    double omega1 = 0.0;  // decay rate while updates succeed
    double omega2 = 0.0;  // growth rate while updates are denied
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
};

/// Decay/growth rates for one mode. Requires the LMI to hold (the growth
/// construction needs the blocked-phase matrix to be negative definite).
ModeRates rates(const PlantModel& plant, const GainSet& gains, std::size_t mode);

/// Dwell-time threshold above which the trajectory-bound series converge.
double tau_d_lower_bound(const PlantModel& plant, const GainSet& gains, double underline_delta);

/// Largest admissible change-count offset, 1 - underline_Delta / tau_D.
double varkappa_upper_bound(double underline_delta, double tau_d);

struct FsdosConditionReport {
    double lhs = 0.0;        // 1/T + Delta/tau_F
    double rhs = 0.0;        // min over modes of omega1/(omega1+omega2)
    bool primary_pass = false;
    double zeta_star = 0.0;  // duration offset inflated by actuation delay
    double t_star = 0.0;     // effective duty-cycle denominator
    std::vector<double> beta;  // per mode, positive when the bound converges
    bool beta_pass = false;
    bool pass() const { return primary_pass && beta_pass; }
};

FsdosConditionReport check_fsdos_condition(const PlantModel& plant, const GainSet& gains,
                                           const AssumptionParams& params, double underline_delta,
                                           double retry_period);

struct SynthesisOptions {
    double margin_shift = 1.0;  // added beyond |A| for the stabilizing solves
    std::vector<double> psi_grid{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    std::vector<double> eps_grid{0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
    /// Scale of the identity right-hand side in the Lyapunov solves for the
    /// P matrices; small scales tame the quadratic P-dependent terms.
    std::vector<double> p_scale_grid{1.0, 0.3, 0.1, 0.03, 0.01, 0.003};
    /// Extra factor on P_e relative to P_p; enlarging the error-side
    /// Lyapunov function weakens the cross-coupling block relative to the
    /// diagonal ones.
    std::vector<double> pe_ratio_grid{1.0, 2.0, 4.0, 8.0};
    double eps34 = kDefaultEps34;
};

struct SynthesisResult {
    bool feasible = false;
    GainSet gains;              // populated with the best grid point found
    double best_margin = 0.0;   // min-mode lambda_min of the LMI matrix
    double psi_used = 0.0;
    double eps1_used = 0.0;
    double eps2_used = 0.0;
    double p_scale_used = 0.0;
    double pe_ratio_used = 0.0;
};

/// Best-effort deterministic grid search: observer gains from the shifted
/// Lyapunov construction, P matrices from closed-loop Lyapunov solves with
/// Q = I, then psi/eps scanned until the LMI passes or the grid is spent.
SynthesisResult synthesize_candidate_gains(const PlantModel& plant, const Matrix& k,
                                           const SynthesisOptions& options);

/// Realized switching history of one run: the mode occupancy segments plus
/// the effective denial intervals over which the trigger need not hold.
struct SwitchingRecord {
    double start_time = 0.0;
    std::size_t initial_mode = 1;        // 1-based
    std::vector<double> switch_times;    // ascending, all > start_time
    std::vector<std::size_t> mode_after; // 1-based, aligned with switch_times
    IntervalSet effective_fsdos;
    double underline_delta = 0.0;        // dwell floor the record must obey
};

/// Lyapunov-comparison trajectory bound evaluated along the realized record:
/// decay at omega1 between events, growth at omega2 across the effective
/// denial intervals, eigenvalue-ratio factors at each mode switch.
double evaluate_iss_bound(const SwitchingRecord& record, const GainSet& gains,
                          const PlantModel& plant, double t, double x0_norm, double w_sup);

struct CertificationReport {
    bool lmi_pass = false;
    std::vector<double> gamma1_lambda_min;
    std::vector<double> gamma2_lambda_min;
    std::vector<double> omega1;
    std::vector<double> omega2;
    std::vector<double> nu1;
    std::vector<double> nu2;
    std::vector<double> nu3;
    std::vector<double> alpha_lower;  // per mode min eigenvalue of P_p/P_e
    std::vector<double> alpha_upper;
    std::vector<double> delta_min_per_mode;
    double delta_min = 0.0;
    double tau_d_bound = 0.0;
    double kappa_bound = 0.0;
    bool rates_available = false;
    bool fsdos_checked = false;
    FsdosConditionReport fsdos;
    bool assumptions_consistent = true;  // tau_D/kappa versus their bounds
    bool pass = false;
};

/// Full offline verification for one gain set; assumption parameters are
/// optional (without them only the LMI/rate/dwell side is checked).
CertificationReport certify(const PlantModel& plant, const GainSet& gains,
                            const TriggerParams& trigger,
                            const std::optional<AssumptionParams>& assumptions);

}  // namespace dosetc
