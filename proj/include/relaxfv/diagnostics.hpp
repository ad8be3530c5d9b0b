#pragma once

// Integral functionals of a solution slice and the relations between them
// that hold along smooth solutions: conservation, entropy dissipation,
// finite propagation speed, the weighted momentum F(t) and its Riccati
// lower envelope.

#include "relaxfv/model.hpp"
#include "relaxfv/planner.hpp"
#include "relaxfv/solver.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaxfv {

class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DiagRecord {
    double t = 0.0;
    double mass_dev = 0.0;  // integral of rho - rho_bar
    double total_mom = 0.0; // integral of rho u
    double F = 0.0;         // integral of x rho u
    double E = 0.0;         // integral of the entropy density
    double D = 0.0;         // integral of S^2
    double D_cum = 0.0;     // trapezoid integral of D over past records
    double support_radius = 0.0;
    double max_grad = 0.0;
    double min_rho = 0.0;

    // Auxiliary integrals used by the F identity, Jensen and Hoelder checks.
    double kinetic = 0.0;           // integral of rho u^2
    double pressure_excess = 0.0;   // integral of p(rho) - p(rho_bar)
    double stress = 0.0;            // integral of S
    double ball_radius = 0.0;       // M + sigma_tilde t
    double ball_x2rho = 0.0;        // integral over B_t of x^2 rho
    double ball_pressure_excess = 0.0;
};

/// What `record` needs besides the field: the model, the support tolerance
/// and the ball B_t = {|x| < M + sigma_tilde t}.
struct RecordContext {
    ModelParams params{2.0, 1.0};
    double eps_support = 1e-6;
    double M = std::numeric_limits<double>::infinity();
    double sigma_tilde = 0.0;
};

/// Midpoint-rule functionals of one slice; D_cum is left at zero.
DiagRecord record(const Field &f, const RecordContext &ctx);

/// Records in time order with D_cum accumulated by the trapezoid rule.
class DiagSeries {
public:
    void push(DiagRecord r);
    const std::vector<DiagRecord> &records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

private:
    std::vector<DiagRecord> records_;
};

struct CheckResult {
    std::string name;
    bool applicable = true;
    bool pass = true;
    /// Smallest slack over all evaluated items; negative when failing.
    double worst_margin = std::numeric_limits<double>::infinity();
    std::string detail;
};

/// mass_dev and total_mom constant to `rel_tol` relative to max(1, |initial|).
CheckResult conservation_check(const std::vector<DiagRecord> &records, double rel_tol = 1e-10);

/// E >= 0, D >= 0, D_cum nondecreasing.
CheckResult record_sanity_check(const std::vector<DiagRecord> &records);

/// E(t) + D_cum(t) <= E(0) + tol * max(1, E(0)).
CheckResult entropy_inequality_check(const std::vector<DiagRecord> &records, double tol = 1e-8);

/// residual_k = (E_{k+1} - E_k) / (t_{k+1} - t_k) + (D_{k+1} + D_k) / 2.
std::vector<double> entropy_balance_residual(const std::vector<DiagRecord> &records);

/// Every residual at most rel_tol * E(0).
CheckResult entropy_residual_check(const std::vector<DiagRecord> &records, double rel_tol = 1e-8);

/// D(t) <= H0 + (max rho0 / 2) |u_{L,M}|^2 at every record.
CheckResult s2_bound_check(const std::vector<DiagRecord> &records, const TheoremPlan &plan);

/// support_radius(t) <= max(R, M) + sigma_tilde t + margin_cells dx.
CheckResult cone_check(const std::vector<DiagRecord> &records, const TheoremPlan &plan, double dx,
                       double margin_cells = 10.0);

/// Largest positive excess of support_radius over max(R, M) + sigma_tilde t.
double cone_overshoot(const std::vector<DiagRecord> &records, const TheoremPlan &plan);

/// A record is smooth when max_grad < grad_limit / 2.
bool is_smooth(const DiagRecord &r, double grad_limit);

struct FDerivativeSample {
    double t = 0.0;
    double fd = 0.0;       // central difference of F
    double identity = 0.0; // kinetic + pressure_excess - stress
    double rel_error = 0.0;
    double weakened_rhs = 0.0; // kinetic - D / 2 - (M + sigma_tilde t)
};

/// One sample per interior record whose neighbours are smooth too.
std::vector<FDerivativeSample> f_derivative_samples(const std::vector<DiagRecord> &records, double grad_limit);

/// Relative error of the identity <= rel_tol and fd >= weakened_rhs.
CheckResult f_derivative_check(const std::vector<DiagRecord> &records, double grad_limit, double rel_tol = 0.05);

/// Integral over B_t of p(rho) - p(rho_bar) >= -tol whenever mass_dev >= 0.
CheckResult jensen_check(const std::vector<DiagRecord> &records, double tol = 1e-10);

/// F^2 <= (integral over B_t of x^2 rho) (integral of rho u^2) (1 + rel_tol).
CheckResult holder_check(const std::vector<DiagRecord> &records, double rel_tol = 1e-10);

struct EnvelopeParams {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double F0 = 0.0;
    double norm_sq = 0.0;
    double M = 0.0;

    static EnvelopeParams from_plan(const TheoremPlan &plan);
    /// All constants positive and F0 > 2 c1.
    bool valid() const;
};

/// Lower envelope of F(t) obtained by integrating the Riccati inequality;
/// nullopt once the bracket is no longer positive (the envelope has escaped
/// to +infinity before t).
std::optional<double> riccati_envelope(double t, const EnvelopeParams &env);

/// F >= c1 and M (1 + c2 t) <= c3 / (2 (1 + c2 t)^3) F^2 at every smooth
/// record. Not applicable unless the envelope parameters are valid and
/// F(0) >= c1.
CheckResult apriori_check(const std::vector<DiagRecord> &records, const EnvelopeParams &env, double grad_limit);

/// F(t) >= envelope(t) - rel_tol F(t) at every smooth record.
CheckResult envelope_check(const std::vector<DiagRecord> &records, const EnvelopeParams &env, double grad_limit,
                           double rel_tol = 0.01);

/// Detected blow-up time strictly before t*.
CheckResult deadline_check(double t_blowup, const TheoremPlan &plan);

} // namespace relaxfv
