#include "dosetc/certification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dosetc {

namespace {

constexpr double kPdTol = 1e-9;
const double kInf = std::numeric_limits<double>::infinity();
const double kNan = std::numeric_limits<double>::quiet_NaN();

Matrix he(const Matrix& m) { return m + m.transpose(); }

Matrix scaled_identity(std::size_t n, double s) {
    Matrix m = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
}

void require_mode(const GainSet& gains, std::size_t mode) {
    if (mode >= gains.mode_count()) {
        throw dimension_error("certification: mode index " + std::to_string(mode) +
                              " out of range");
    }
}

/// Blocked-phase quadratic-form matrix; its negative must be PD for the
/// growth-rate construction to apply.
Matrix build_gamma5(const PlantModel& plant, const GainSet& gains, std::size_t mode) {
    const std::size_t n = plant.state_dim();
    const Matrix bk = plant.b() * gains.k;
    const Matrix a_bk = plant.a() - bk;
    const Matrix& pp = gains.p_p[mode];
    const Matrix& pe = gains.p_e[mode];
    const Matrix a_lc = plant.a() - gains.l[mode] * plant.channel(mode);

    Matrix g5 = Matrix::zeros(2 * n, 2 * n);
    g5.set_block(0, 0, he(pp * a_bk) + pp * pp * (1.0 / gains.eps1[mode]));
    g5.set_block(0, n, pp * bk);
    g5.set_block(n, 0, (pp * bk).transpose());
    g5.set_block(n, n, he(pe * a_lc) + pe * pe * (1.0 / gains.eps2[mode]));
    return g5;
}

struct ModeAlpha {
    double lower;
    double upper;
};

ModeAlpha mode_alpha(const GainSet& gains, std::size_t mode) {
    const Matrix& pp = gains.p_p[mode];
    const Matrix& pe = gains.p_e[mode];
    return {std::min(lambda_min(pp), lambda_min(pe)),
            std::max(lambda_max(pp), lambda_max(pe))};
}

}  // namespace

void GainSet::validate(const PlantModel& plant) const {
    const std::size_t n = plant.state_dim();
    const std::size_t modes = plant.channel_count();
    if (k.rows() != plant.input_dim() || k.cols() != n) {
        throw dimension_error("GainSet: K must be n_u x n_p");
    }
    if (l.size() != modes || p_p.size() != modes || p_e.size() != modes ||
        eps1.size() != modes || eps2.size() != modes || eps3.size() != modes ||
        eps4.size() != modes) {
        throw dimension_error("GainSet: one gain/Lyapunov/slack entry per channel required");
    }
    if (!(psi1 > 0.0) || !(psi2 > 0.0)) {
        throw config_error("GainSet: psi1 and psi2 must be positive");
    }
    for (std::size_t m = 0; m < modes; ++m) {
        if (l[m].rows() != n || l[m].cols() != plant.output_dim(m)) {
            throw dimension_error("GainSet: L must be n_p x n_y for its channel");
        }
        if (p_p[m].rows() != n || p_p[m].cols() != n || p_e[m].rows() != n ||
            p_e[m].cols() != n) {
            throw dimension_error("GainSet: P matrices must be n_p x n_p");
        }
        if (!is_positive_definite(p_p[m], kPdTol) || !is_positive_definite(p_e[m], kPdTol)) {
            throw config_error("GainSet: P matrices must be symmetric positive definite");
        }
        if (!(eps1[m] > 0.0) || !(eps2[m] > 0.0) || !(eps3[m] > 0.0) || !(eps4[m] > 0.0)) {
            throw config_error("GainSet: eps slacks must be positive");
        }
    }
    // Feasibility of the closed-loop Lyapunov equation certifies A - BK Hurwitz.
    solve_lyapunov(plant.a() - plant.b() * k, Matrix::identity(n));
}

Matrix build_gamma1(const PlantModel& plant, const GainSet& gains, std::size_t mode) {
    require_mode(gains, mode);
    const std::size_t n = plant.state_dim();
    const Matrix& c = plant.channel(mode);
    const Matrix bk = plant.b() * gains.k;
    const Matrix a_bk = plant.a() - bk;
    const Matrix& pp = gains.p_p[mode];
    const Matrix& pe = gains.p_e[mode];
    const Matrix a_lc = plant.a() - gains.l[mode] * c;
    const Matrix pp_bk = pp * bk;
    const Matrix pe_l = pe * gains.l[mode];

    const Matrix theta11 = -he(pp * a_bk) - pp_bk * pp_bk.transpose() -
                           gains.psi1 * (c.transpose() * c) - scaled_identity(n, gains.psi2) -
                           pp * pp * (1.0 / gains.eps1[mode]);
    const Matrix theta12 = -1.0 * pp_bk + scaled_identity(n, gains.psi2);
    const Matrix theta22 = -he(pe * a_lc) - pe_l * pe_l.transpose() -
                           scaled_identity(n, gains.psi2) - pe * pe * (1.0 / gains.eps2[mode]);

    Matrix g1 = Matrix::zeros(2 * n, 2 * n);
    g1.set_block(0, 0, theta11);
    g1.set_block(0, n, theta12);
    g1.set_block(n, 0, theta12.transpose());
    g1.set_block(n, n, theta22);
    return g1;
}

Matrix build_gamma2(const PlantModel& plant, const GainSet& gains, std::size_t mode) {
    require_mode(gains, mode);
    const std::size_t n = plant.state_dim();
    const Matrix& c = plant.channel(mode);
    const std::size_t ny = c.rows();
    const Matrix bk = plant.b() * gains.k;
    const Matrix a_bk = plant.a() - bk;
    const Matrix& pp = gains.p_p[mode];
    const Matrix& pe = gains.p_e[mode];
    const Matrix pp_bk = pp * bk;
    const Matrix big_n = pe * gains.l[mode];

    const Matrix theta1 = -he(pp * a_bk) - gains.psi1 * (c.transpose() * c) -
                          scaled_identity(n, gains.psi2);
    const Matrix theta12 = -1.0 * pp_bk + scaled_identity(n, gains.psi2);
    const Matrix theta2 = -he(pe * plant.a()) + big_n * c + (big_n * c).transpose() -
                          scaled_identity(n, gains.psi2);

    Matrix g2 = Matrix::zeros(5 * n + ny, 5 * n + ny);
    g2.set_block(0, 0, theta1);
    g2.set_block(0, n, pp);
    g2.set_block(0, 2 * n, pp_bk);
    g2.set_block(0, 3 * n, theta12);
    g2.set_block(n, n, scaled_identity(n, gains.eps1[mode]));
    g2.set_block(2 * n, 2 * n, Matrix::identity(n));
    g2.set_block(3 * n, 3 * n, theta2);
    g2.set_block(3 * n, 4 * n, pe);
    g2.set_block(3 * n, 5 * n, big_n);
    g2.set_block(4 * n, 4 * n, scaled_identity(n, gains.eps2[mode]));
    g2.set_block(5 * n, 5 * n, Matrix::identity(ny));
    // Mirror the upper-triangle blocks.
    g2.set_block(n, 0, pp.transpose());
    g2.set_block(2 * n, 0, pp_bk.transpose());
    g2.set_block(3 * n, 0, theta12.transpose());
    g2.set_block(4 * n, 3 * n, pe.transpose());
    g2.set_block(5 * n, 3 * n, big_n.transpose());
    return g2;
}

LmiReport verify_lmi(const PlantModel& plant, const GainSet& gains) {
    gains.validate(plant);
    LmiReport report;
    report.pass = true;
    for (std::size_t mode = 0; mode < gains.mode_count(); ++mode) {
        const double lmin = lambda_min(build_gamma2(plant, gains, mode));
        report.lambda_min.push_back(lmin);
        report.mode_pass.push_back(lmin > kPdTol);
        report.pass = report.pass && report.mode_pass.back();
    }
    return report;
}

ModeRates rates(const PlantModel& plant, const GainSet& gains, std::size_t mode) {
    require_mode(gains, mode);
    const Matrix& c = plant.channel(mode);
    const Matrix& pp = gains.p_p[mode];
    const Matrix& pe = gains.p_e[mode];

    ModeRates out;
    const ModeAlpha alpha = mode_alpha(gains, mode);
    out.omega1 = lambda_min(build_gamma1(plant, gains, mode)) / alpha.upper;

    out.gamma1 = lambda_min(-build_gamma5(plant, gains, mode));
    if (!(out.gamma1 > 0.0)) {
        throw certification_order_error(
            "rates: blocked-phase matrix not negative definite for mode " +
            std::to_string(mode + 1));
    }
    out.gamma2 = lambda_max_symmetric_part(pp * (plant.b() * gains.k));
    out.gamma3 = spectral_norm(pe * gains.l[mode]);

    const Matrix g3(2, 2,
                    {2.0 * out.gamma2 - out.gamma1, out.gamma3, out.gamma3, -out.gamma1});
    const double root2p1 = 1.0 + std::sqrt(2.0);
    const double sp1 = std::sqrt(gains.psi1);
    const double sp2 = std::sqrt(gains.psi2);
    const double c_norm = spectral_norm(c);
    const double xi11 = out.gamma2 * (root2p1 * sp1 * c_norm + root2p1 * sp2 + 2.0);
    const double xi12 = out.gamma2 * (root2p1 * sp2 + 2.0);
    const double xi21 = out.gamma3 * ((root2p1 * sp1 + 2.0) * c_norm + root2p1 * sp2);
    const double xi22 = out.gamma3 * root2p1 * sp2;
    const Matrix g4(2, 2, {xi11, xi12, xi21, xi22});

    out.omega2 = (lambda_max(g3) + lambda_max_symmetric_part(g4)) / alpha.lower;
    return out;
}

double tau_d_lower_bound(const PlantModel& plant, const GainSet& gains,
                         double underline_delta) {
    double alpha_hi = 0.0;
    double alpha_lo = kInf;
    double zeta_min = kInf;
    for (std::size_t mode = 0; mode < gains.mode_count(); ++mode) {
        const ModeAlpha alpha = mode_alpha(gains, mode);
        alpha_hi = std::max(alpha_hi, alpha.upper);
        alpha_lo = std::min(alpha_lo, alpha.lower);
        zeta_min = std::min(zeta_min, lambda_min(build_gamma1(plant, gains, mode)));
    }
    if (!(zeta_min > 0.0)) {
        throw certification_order_error("tau_d_lower_bound: dissipation matrix not PD");
    }
    const double term = alpha_hi / zeta_min * std::log(alpha_hi / alpha_lo);
    return std::max(underline_delta, term);
}

double varkappa_upper_bound(double underline_delta, double tau_d) {
    if (!(tau_d > underline_delta)) {
        throw ordering_error(
            "varkappa_upper_bound: tau_D must exceed the minimum inter-event time");
    }
    return 1.0 - underline_delta / tau_d;
}

FsdosConditionReport check_fsdos_condition(const PlantModel& plant, const GainSet& gains,
                                           const AssumptionParams& params,
                                           double underline_delta, double retry_period) {
    FsdosConditionReport report;
    report.lhs = 1.0 / params.t_ratio + underline_delta / params.tau_f;
    report.rhs = kInf;

    const double delta_star = retry_period;
    report.zeta_star = params.zeta + (1.0 + params.eta) * delta_star;
    report.t_star = params.t_ratio * params.tau_f /
                    (params.t_ratio * delta_star + params.tau_f);

    report.beta_pass = true;
    for (std::size_t mode = 0; mode < gains.mode_count(); ++mode) {
        const ModeRates r = rates(plant, gains, mode);
        report.rhs = std::min(report.rhs, r.omega1 / (r.omega1 + r.omega2));
        const double beta = r.omega1 - (r.omega1 + r.omega2) / report.t_star;
        report.beta.push_back(beta);
        report.beta_pass = report.beta_pass && beta > 0.0;
    }
    report.primary_pass = report.lhs < report.rhs;
    return report;
}

SynthesisResult synthesize_candidate_gains(const PlantModel& plant, const Matrix& k,
                                           const SynthesisOptions& options) {
    const std::size_t n = plant.state_dim();
    const std::size_t modes = plant.channel_count();
    const Matrix a_bk = plant.a() - plant.b() * k;
    const Matrix p_p = solve_lyapunov(a_bk, Matrix::identity(n));

    SynthesisResult result;
    result.best_margin = -kInf;

    std::vector<Matrix> l_gains;
    std::vector<Matrix> p_e;
    const double beta = plant.a().frobenius_norm() + options.margin_shift;
    for (std::size_t mode = 0; mode < modes; ++mode) {
        const Matrix& c = plant.channel(mode);
        // X solves (A^T + beta I) X + X (A + beta I) = 2 C^T C; for an
        // observable channel X is PD and A - X^{-1} C^T C is Hurwitz with
        // stability margin beta.
        Matrix shifted = -1.0 * plant.a();
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= beta;
        Matrix x;
        try {
            x = solve_lyapunov(shifted, 2.0 * (c.transpose() * c));
        } catch (const no_solution_error&) {
            return result;  // channel not observable enough for the construction
        }
        Matrix l;
        try {
            l = inverse(x) * c.transpose();
        } catch (const rank_error&) {
            return result;
        }
        Matrix pe_mode;
        try {
            pe_mode = solve_lyapunov(plant.a() - l * c, Matrix::identity(n));
        } catch (const no_solution_error&) {
            return result;
        }
        l_gains.push_back(std::move(l));
        p_e.push_back(std::move(pe_mode));
    }

    GainSet candidate;
    candidate.k = k;
    candidate.l = l_gains;
    candidate.eps3.assign(modes, options.eps34);
    candidate.eps4.assign(modes, options.eps34);

    for (double scale : options.p_scale_grid) {
      for (double ratio : options.pe_ratio_grid) {
        candidate.p_p.assign(modes, p_p * scale);
        candidate.p_e.clear();
        for (const Matrix& pe : p_e) candidate.p_e.push_back(pe * (scale * ratio));
        for (double psi : options.psi_grid) {
            candidate.psi1 = psi;
            candidate.psi2 = psi;
            for (double e1 : options.eps_grid) {
                candidate.eps1.assign(modes, e1);
                for (double e2 : options.eps_grid) {
                    candidate.eps2.assign(modes, e2);
                    const LmiReport report = verify_lmi(plant, candidate);
                    const double margin =
                        *std::min_element(report.lambda_min.begin(), report.lambda_min.end());
                    if (margin > result.best_margin || report.pass) {
                        result.best_margin = margin;
                        result.gains = candidate;
                        result.psi_used = psi;
                        result.eps1_used = e1;
                        result.eps2_used = e2;
                        result.p_scale_used = scale;
                        result.pe_ratio_used = ratio;
                    }
                    if (report.pass) {
                        result.feasible = true;
                        return result;
                    }
                }
            }
        }
      }
    }
    return result;
}

double evaluate_iss_bound(const SwitchingRecord& record, const GainSet& gains,
                          const PlantModel& plant, double t, double x0_norm, double w_sup) {
    gains.validate(plant);
    const std::size_t modes = gains.mode_count();
    if (record.initial_mode < 1 || record.initial_mode > modes) {
        throw record_error("evaluate_iss_bound: initial mode out of range");
    }
    if (record.switch_times.size() != record.mode_after.size()) {
        throw record_error("evaluate_iss_bound: switch times and modes misaligned");
    }
    if (!(t >= record.start_time)) {
        throw record_error("evaluate_iss_bound: t precedes the record start");
    }
    if (x0_norm < 0.0 || w_sup < 0.0) {
        throw record_error("evaluate_iss_bound: norms must be nonnegative");
    }
    double prev = record.start_time;
    for (std::size_t i = 0; i < record.switch_times.size(); ++i) {
        const double s = record.switch_times[i];
        if (!(s > prev)) {
            throw record_error("evaluate_iss_bound: switch times must be increasing");
        }
        if (s - prev < record.underline_delta - 1e-12) {
            throw record_error("evaluate_iss_bound: switch spacing below the dwell floor");
        }
        if (record.mode_after[i] < 1 || record.mode_after[i] > modes) {
            throw record_error("evaluate_iss_bound: switch mode out of range");
        }
        prev = s;
    }

    std::vector<ModeAlpha> alpha;
    std::vector<double> omega1(modes), nu1(modes);
    std::vector<double> omega2(modes, kNan), nu3(modes, kNan);
    for (std::size_t m = 0; m < modes; ++m) {
        alpha.push_back(mode_alpha(gains, m));
        const double zeta1 = lambda_min(build_gamma1(plant, gains, m));
        if (!(zeta1 > 0.0)) {
            throw certification_order_error(
                "evaluate_iss_bound: dissipation matrix not PD for mode " +
                std::to_string(m + 1));
        }
        omega1[m] = zeta1 / alpha[m].upper;
        nu1[m] = (gains.eps1[m] + gains.eps2[m] + gains.psi1) / omega1[m];
    }
    const auto growth = [&](std::size_t m) {
        if (std::isnan(omega2[m])) {
            const ModeRates r = rates(plant, gains, m);
            omega2[m] = r.omega2;
            const double nu2 =
                gains.eps1[m] + gains.eps2[m] + 0.5 * gains.eps3[m] + 0.5 * gains.eps4[m];
            nu3[m] = nu2 / r.omega2;
        }
    };

    std::vector<double> breakpoints{record.start_time, t};
    for (double s : record.switch_times) {
        if (s <= t) breakpoints.push_back(s);
    }
    const auto add_in_range = [&](const std::vector<double>& pts) {
        for (double p : pts) {
            if (p > record.start_time && p < t) breakpoints.push_back(p);
        }
    };
    add_in_range(record.effective_fsdos.start_points());
    add_in_range(record.effective_fsdos.end_points());
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    const double w2 = w_sup * w_sup;
    std::size_t mode = record.initial_mode;  // 1-based
    std::size_t next_switch = 0;
    double v = alpha[mode - 1].upper * x0_norm * x0_norm;
    double cur = record.start_time;
    for (double bp : breakpoints) {
        if (bp <= cur) continue;
        const double len = bp - cur;
        const std::size_t m = mode - 1;
        if (record.effective_fsdos.contains_interior(0.5 * (cur + bp))) {
            growth(m);
            v = std::exp(omega2[m] * len) * (v + nu3[m] * w2);
        } else {
            v = std::exp(-omega1[m] * len) * v + nu1[m] * w2;
        }
        cur = bp;
        while (next_switch < record.switch_times.size() &&
               record.switch_times[next_switch] == bp) {
            const std::size_t new_mode = record.mode_after[next_switch];
            v *= alpha[new_mode - 1].upper / alpha[mode - 1].lower;
            mode = new_mode;
            ++next_switch;
        }
    }
    return std::sqrt(v / alpha[mode - 1].lower);
}

CertificationReport certify(const PlantModel& plant, const GainSet& gains,
                            const TriggerParams& trigger,
                            const std::optional<AssumptionParams>& assumptions) {
    trigger.validate();
    CertificationReport report;

    const LmiReport lmi = verify_lmi(plant, gains);
    report.gamma2_lambda_min = lmi.lambda_min;
    report.lmi_pass = lmi.pass;

    report.rates_available = true;
    for (std::size_t mode = 0; mode < gains.mode_count(); ++mode) {
        const ModeAlpha alpha = mode_alpha(gains, mode);
        report.alpha_lower.push_back(alpha.lower);
        report.alpha_upper.push_back(alpha.upper);
        const double zeta1 = lambda_min(build_gamma1(plant, gains, mode));
        report.gamma1_lambda_min.push_back(zeta1);
        const double w1 = zeta1 / alpha.upper;
        report.omega1.push_back(w1);
        report.nu1.push_back(
            w1 > 0.0 ? (gains.eps1[mode] + gains.eps2[mode] + gains.psi1) / w1 : kNan);
        const double n2 = gains.eps1[mode] + gains.eps2[mode] + 0.5 * gains.eps3[mode] +
                          0.5 * gains.eps4[mode];
        report.nu2.push_back(n2);
        try {
            const ModeRates r = rates(plant, gains, mode);
            report.omega2.push_back(r.omega2);
            report.nu3.push_back(n2 / r.omega2);
        } catch (const certification_order_error&) {
            report.omega2.push_back(kNan);
            report.nu3.push_back(kNan);
            report.rates_available = false;
        }
    }

    const MinInterExecution mie = min_inter_execution(plant, gains.k, gains.l, trigger);
    report.delta_min_per_mode = mie.per_mode;
    report.delta_min = mie.global;

    const bool zeno_consistent = trigger.underline_delta <= report.delta_min + 1e-12;
    try {
        report.tau_d_bound = tau_d_lower_bound(plant, gains, trigger.underline_delta);
    } catch (const certification_order_error&) {
        report.tau_d_bound = kNan;
    }

    report.pass = report.lmi_pass && zeno_consistent;
    if (assumptions.has_value()) {
        report.fsdos_checked = true;
        assumptions->validate(trigger.underline_delta);
        report.kappa_bound = varkappa_upper_bound(trigger.underline_delta, assumptions->tau_d);
        report.assumptions_consistent =
            assumptions->varkappa <= report.kappa_bound + 1e-12 &&
            (std::isnan(report.tau_d_bound) ? false
                                            : assumptions->tau_d > report.tau_d_bound);
        if (report.rates_available) {
            report.fsdos = check_fsdos_condition(plant, gains, *assumptions,
                                                 trigger.underline_delta,
                                                 trigger.effective_retry_period());
        }
        report.pass = report.pass && report.assumptions_consistent &&
                      report.rates_available && report.fsdos.pass();
    } else {
        report.kappa_bound = kNan;
    }
    return report;
}

}  // namespace dosetc
