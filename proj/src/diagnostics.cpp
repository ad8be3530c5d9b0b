#include "relaxfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaxfv {

DiagRecord record(const Field &f, const RecordContext &ctx) {
    const ModelParams &params = ctx.params;
    const double dx = f.grid.dx();
    const double rho_bar = params.rho_bar();
    const double p_bar = pressure(rho_bar, params);

    DiagRecord r;
    r.t = f.time;
    r.ball_radius = ctx.M + ctx.sigma_tilde * f.time;
    r.min_rho = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
        const ConsTriple &c = f.cells[i];
        const double x = f.grid.center(i);
        if (!std::isfinite(c.rho) || !std::isfinite(c.mom) || !std::isfinite(c.rw) || !(c.rho > 0.0)) {
            std::ostringstream os;
            os << "invalid cell " << i << " at x = " << x << ", t = " << f.time;
            throw DiagnosticError(os.str());
        }
        const PointState p = to_primitive(c);
        const double dp = pressure(p.rho, params) - p_bar;
        r.mass_dev += (p.rho - rho_bar) * dx;
        r.total_mom += c.mom * dx;
        r.F += x * c.mom * dx;
        r.E += entropy_density(p, params) * dx;
        r.D += p.S * p.S * dx;
        r.kinetic += c.mom * p.u * dx;
        r.pressure_excess += dp * dx;
        r.stress += p.S * dx;
        if (std::abs(x) < r.ball_radius) {
            r.ball_x2rho += x * x * p.rho * dx;
            r.ball_pressure_excess += dp * dx;
        }
        const double dev = std::max({std::abs(p.rho - rho_bar), std::abs(p.u), std::abs(p.S)});
        if (dev > ctx.eps_support) r.support_radius = std::max(r.support_radius, std::abs(x));
        r.min_rho = std::min(r.min_rho, p.rho);
    }
    r.max_grad = max_velocity_gradient(f).max_grad;
    return r;
}

void DiagSeries::push(DiagRecord r) {
    if (records_.empty()) {
        r.D_cum = 0.0;
    } else {
        const DiagRecord &prev = records_.back();
        if (!(r.t >= prev.t)) throw DiagnosticError("records must be pushed in time order");
        r.D_cum = prev.D_cum + 0.5 * (prev.D + r.D) * (r.t - prev.t);
    }
    records_.push_back(r);
}

namespace {

void note(CheckResult &c, double margin, const DiagRecord &r, const char *what) {
    if (margin < c.worst_margin) c.worst_margin = margin;
    if (margin < 0.0 && c.pass) {
        c.pass = false;
        std::ostringstream os;
        os << what << " violated at t = " << r.t << " (margin " << margin << ")";
        c.detail = os.str();
    }
}

CheckResult named(std::string name) {
    CheckResult c;
    c.name = std::move(name);
    return c;
}

CheckResult not_applicable(std::string name, std::string why) {
    CheckResult c;
    c.name = std::move(name);
    c.applicable = false;
    c.pass = true;
    c.worst_margin = 0.0;
    c.detail = std::move(why);
    return c;
}

} // namespace

CheckResult conservation_check(const std::vector<DiagRecord> &records, double rel_tol) {
    if (records.empty()) return not_applicable("conservation", "no records");
    CheckResult c = named("conservation");
    const DiagRecord &first = records.front();
    const double mass_tol = rel_tol * std::max(1.0, std::abs(first.mass_dev));
    const double mom_tol = rel_tol * std::max(1.0, std::abs(first.total_mom));
    for (const auto &r : records) {
        note(c, mass_tol - std::abs(r.mass_dev - first.mass_dev), r, "mass conservation");
        note(c, mom_tol - std::abs(r.total_mom - first.total_mom), r, "momentum conservation");
    }
    return c;
}

CheckResult record_sanity_check(const std::vector<DiagRecord> &records) {
    CheckResult c = named("record_sanity");
    for (std::size_t k = 0; k < records.size(); ++k) {
        const DiagRecord &r = records[k];
        note(c, r.E, r, "E >= 0");
        note(c, r.D, r, "D >= 0");
        if (k > 0) note(c, r.D_cum - records[k - 1].D_cum, r, "D_cum nondecreasing");
    }
    return c;
}

CheckResult entropy_inequality_check(const std::vector<DiagRecord> &records, double tol) {
    if (records.empty()) return not_applicable("entropy_inequality", "no records");
    CheckResult c = named("entropy_inequality");
    const double E0 = records.front().E;
    const double bound = E0 + tol * std::max(1.0, E0);
    for (const auto &r : records) note(c, bound - (r.E + r.D_cum), r, "E + D_cum <= E(0)");
    return c;
}

std::vector<double> entropy_balance_residual(const std::vector<DiagRecord> &records) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < records.size(); ++k) {
        const DiagRecord &a = records[k];
        const DiagRecord &b = records[k + 1];
        const double h = b.t - a.t;
        if (!(h > 0.0)) continue;
        out.push_back((b.E - a.E) / h + 0.5 * (a.D + b.D));
    }
    return out;
}

CheckResult entropy_residual_check(const std::vector<DiagRecord> &records, double rel_tol) {
    if (records.size() < 2) return not_applicable("entropy_residual", "fewer than two records");
    CheckResult c = named("entropy_residual");
    const double tol = rel_tol * records.front().E;
    const auto res = entropy_balance_residual(records);
    for (std::size_t k = 0; k < res.size(); ++k) note(c, tol - res[k], records[k + 1], "entropy residual <= 0");
    return c;
}

CheckResult s2_bound_check(const std::vector<DiagRecord> &records, const TheoremPlan &plan) {
    CheckResult c = named("s2_bound");
    const double bound = plan.H0 + 0.5 * plan.rho_max * plan.norm_sq;
    for (const auto &r : records) note(c, bound - r.D, r, "integral of S^2 bound");
    return c;
}

CheckResult cone_check(const std::vector<DiagRecord> &records, const TheoremPlan &plan, double dx,
                       double margin_cells) {
    CheckResult c = named("cone");
    const double base = std::max(plan.R, static_cast<double>(plan.M));
    for (const auto &r : records) {
        note(c, base + plan.sigma_tilde * r.t + margin_cells * dx - r.support_radius, r, "propagation cone");
    }
    return c;
}

double cone_overshoot(const std::vector<DiagRecord> &records, const TheoremPlan &plan) {
    const double base = std::max(plan.R, static_cast<double>(plan.M));
    double worst = 0.0;
    for (const auto &r : records) worst = std::max(worst, r.support_radius - (base + plan.sigma_tilde * r.t));
    return worst;
}

bool is_smooth(const DiagRecord &r, double grad_limit) { return r.max_grad < 0.5 * grad_limit; }

std::vector<FDerivativeSample> f_derivative_samples(const std::vector<DiagRecord> &records, double grad_limit) {
    std::vector<FDerivativeSample> out;
    for (std::size_t k = 1; k + 1 < records.size(); ++k) {
        const DiagRecord &a = records[k - 1];
        const DiagRecord &m = records[k];
        const DiagRecord &b = records[k + 1];
        if (!is_smooth(a, grad_limit) || !is_smooth(m, grad_limit) || !is_smooth(b, grad_limit)) continue;
        const double h1 = m.t - a.t;
        const double h2 = b.t - m.t;
        if (!(h1 > 0.0) || !(h2 > 0.0)) continue;
        FDerivativeSample s;
        s.t = m.t;
        // second-order central difference on a possibly uneven stencil
        s.fd = (h1 * h1 * (b.F - m.F) + h2 * h2 * (m.F - a.F)) / (h1 * h2 * (h1 + h2));
        s.identity = m.kinetic + m.pressure_excess - m.stress;
        const double scale = std::max(std::abs(s.identity), std::abs(s.fd));
        s.rel_error = scale > 0.0 ? std::abs(s.fd - s.identity) / scale : 0.0;
        s.weakened_rhs = m.kinetic - 0.5 * m.D - m.ball_radius;
        out.push_back(s);
    }
    return out;
}

CheckResult f_derivative_check(const std::vector<DiagRecord> &records, double grad_limit, double rel_tol) {
    const auto samples = f_derivative_samples(records, grad_limit);
    if (samples.empty()) return not_applicable("f_derivative", "no smooth interior records");
    CheckResult c = named("f_derivative");
    for (const auto &s : samples) {
        DiagRecord at;
        at.t = s.t;
        note(c, rel_tol - s.rel_error, at, "F' identity");
        note(c, s.fd - s.weakened_rhs, at, "weakened F' inequality");
    }
    return c;
}

CheckResult jensen_check(const std::vector<DiagRecord> &records, double tol) {
    CheckResult c = named("jensen");
    bool any = false;
    for (const auto &r : records) {
        if (r.mass_dev < 0.0) continue;
        any = true;
        note(c, r.ball_pressure_excess + tol, r, "pressure excess over B_t");
    }
    if (!any) return not_applicable("jensen", "mass deviation negative at every record");
    return c;
}

CheckResult holder_check(const std::vector<DiagRecord> &records, double rel_tol) {
    CheckResult c = named("holder");
    for (const auto &r : records) {
        const double bound = r.ball_x2rho * r.kinetic;
        note(c, bound * (1.0 + rel_tol) - r.F * r.F, r, "F^2 <= (x^2 rho)(rho u^2)");
    }
    return c;
}

EnvelopeParams EnvelopeParams::from_plan(const TheoremPlan &plan) {
    return {plan.c1, plan.c2, plan.c3, plan.c4, plan.c5, plan.F0, plan.norm_sq, static_cast<double>(plan.M)};
}

bool EnvelopeParams::valid() const {
    return c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && c4 >= 0.0 && c5 > 0.0 && norm_sq >= 0.0 && M > 0.0 &&
           F0 > 2.0 * c1;
}

std::optional<double> riccati_envelope(double t, const EnvelopeParams &env) {
    const double s = 1.0 + env.c2 * t;
    const double bracket = 1.0 / env.F0 + env.c3 / (4.0 * env.c2 * s * s) - env.c3 / (4.0 * env.c2) + env.c4 +
                           env.c5 * env.norm_sq;
    if (!(bracket > 0.0)) return std::nullopt;
    return 1.0 / bracket;
}

CheckResult apriori_check(const std::vector<DiagRecord> &records, const EnvelopeParams &env, double grad_limit) {
    if (records.empty() || !env.valid() || records.front().F < env.c1) {
        return not_applicable("apriori", "not a theorem run");
    }
    CheckResult c = named("apriori");
    for (const auto &r : records) {
        if (!is_smooth(r, grad_limit)) continue;
        const double s = 1.0 + env.c2 * r.t;
        note(c, r.F - env.c1, r, "F >= c1");
        note(c, env.c3 / (2.0 * s * s * s) * r.F * r.F - env.M * s, r, "M(1 + c2 t) <= c3 F^2 / (2 (1 + c2 t)^3)");
    }
    return c;
}

CheckResult envelope_check(const std::vector<DiagRecord> &records, const EnvelopeParams &env, double grad_limit,
                           double rel_tol) {
    if (records.empty() || !env.valid()) return not_applicable("envelope", "not a theorem run");
    CheckResult c = named("envelope");
    for (const auto &r : records) {
        if (!is_smooth(r, grad_limit)) continue;
        const auto lower = riccati_envelope(r.t, env);
        if (!lower) {
            // a smooth record past the escape time contradicts the envelope
            note(c, -1.0, r, "Riccati envelope escaped");
            continue;
        }
        note(c, r.F - (*lower - rel_tol * r.F), r, "F above Riccati envelope");
    }
    return c;
}

CheckResult deadline_check(double t_blowup, const TheoremPlan &plan) {
    if (!plan.t_star) return not_applicable("deadline", "plan has no finite deadline");
    CheckResult c = named("deadline");
    c.worst_margin = *plan.t_star - t_blowup;
    c.pass = t_blowup < *plan.t_star;
    std::ostringstream os;
    os << "t_s = " << t_blowup << ", t* = " << *plan.t_star;
    c.detail = os.str();
    return c;
}

} // namespace relaxfv
