#include "relaxfv/cli.hpp"

#include "relaxfv/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace relaxfv {

namespace fs = std::filesystem;

namespace {

std::string num(double v, int digits = 10) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Overrides {
    std::optional<std::string> config;
    std::optional<double> gamma, tau, L, dx, cfl, t_end, R;
    std::optional<int> M, order, max_L, max_M;
    std::optional<std::string> splitting, variant;
};

void add_common(CLI::App *app, Overrides &o) {
    app->add_option("--config", o.config, "INI configuration file");
    app->add_option("--gamma", o.gamma, "adiabatic exponent (> 1)");
    app->add_option("--tau", o.tau, "relaxation time (> 0)");
    app->add_option("--L", o.L, "profile amplitude");
    app->add_option("--M", o.M, "profile half-support (even integer)");
    app->add_option("--R", o.R, "support radius of rho0 - 1 and S0");
    app->add_option("--dx", o.dx, "cell width");
    app->add_option("--cfl", o.cfl, "Courant number in (0, 1)");
    app->add_option("--t-end", o.t_end, "final time");
    app->add_option("--order", o.order, "spatial order (1 or 2)");
    app->add_option("--splitting", o.splitting, "godunov or strang");
    app->add_option("--profile-variant", o.variant, "corrected or printed");
    app->add_option("--max-L", o.max_L, "largest L the planner may choose");
    app->add_option("--max-M", o.max_M, "largest M the planner may choose");
}

RunSpec resolve_spec(const Overrides &o) {
    RunSpec s = o.config ? load_run_spec(*o.config) : RunSpec{};
    if (o.gamma) s.gamma = *o.gamma;
    if (o.tau) s.tau = *o.tau;
    if (o.L) s.L = *o.L;
    if (o.M) s.M = *o.M;
    if (o.R) s.R = *o.R;
    if (o.dx) s.dx = *o.dx;
    if (o.cfl) s.cfl = *o.cfl;
    if (o.t_end) s.t_end = *o.t_end;
    if (o.order) s.order = *o.order;
    if (o.splitting) s.splitting = parse_splitting(*o.splitting);
    if (o.variant) s.variant = parse_profile_variant(*o.variant);
    if (o.max_L) s.policy.max_L = *o.max_L;
    if (o.max_M) s.policy.max_M = *o.max_M;
    s.policy.variant = s.variant;
    return s;
}

void print_plan(const TheoremPlan &p, std::ostream &out) {
    out << "gamma        " << num(p.gamma) << "\n"
        << "tau          " << num(p.tau) << "\n"
        << "R            " << num(p.R) << "\n"
        << "rho0 range   [" << num(p.rho_min) << ", " << num(p.rho_max) << "], mass " << num(p.mass) << "\n"
        << "sigma        " << num(p.sigma) << "\n"
        << "sigma_tilde  " << num(p.sigma_tilde) << "\n"
        << "L            " << num(p.L) << "\n"
        << "M            " << p.M << "\n"
        << "variant      " << to_string(p.variant) << "\n"
        << "H0           " << num(p.H0) << "\n"
        << "|u|^2        " << num(p.norm_sq) << "\n"
        << "c1..c5       " << num(p.c1) << " " << num(p.c2) << " " << num(p.c3) << " " << num(p.c4) << " "
        << num(p.c5) << "\n"
        << "F0           " << num(p.F0) << "\n"
        << "threshold    " << num(p.F0_threshold) << "\n"
        << "8 c2 / c3    " << num(p.F0_critical) << "\n"
        << "t*           " << (p.t_star ? num(*p.t_star) : std::string("none")) << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-3s %-17s %-17s %-13s %-13s %s\n", "inequality", "rel", "lhs", "rhs",
                  "margin", "rel_margin", "status");
    out << line;
    for (const auto &c : p.checks) {
        std::snprintf(line, sizeof line, "%-20s %-3s %-17s %-17s %-13s %-13s %s\n", c.name.c_str(),
                      c.relation.c_str(), num(c.lhs, 12).c_str(), num(c.rhs, 12).c_str(), num(c.margin, 6).c_str(),
                      num(c.rel_margin, 6).c_str(), c.pass ? "PASS" : "FAIL");
        out << line;
    }
    out << "\nadmissible   " << (p.admissible ? "yes" : "no (" + p.violated + ")") << "\n";
}

nlohmann::json read_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(path + ": " + e.what());
    }
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string series_plot_script() {
    return "# gnuplot script for series.csv\n"
           "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set xlabel 't'\n"
           "set multiplot layout 2,2\n"
           "plot 'series.csv' using 1:4 with lines\n"
           "plot 'series.csv' using 1:5 with lines, '' using 1:($5+$7) with lines title 'E + D_cum'\n"
           "plot 'series.csv' using 1:8 with lines\n"
           "set logscale y\n"
           "plot 'series.csv' using 1:9 with lines\n"
           "unset multiplot\n";
}

int cmd_plan(const Overrides &o, const std::optional<std::string> &out_dir, std::ostream &out) {
    RunSpec spec = resolve_spec(o);
    if (spec.L.has_value() != spec.M.has_value()) throw ConfigError("L and M must be given together");
    const TheoremPlan p = resolve_plan(spec);
    print_plan(p, out);
    if (out_dir) {
        fs::create_directories(*out_dir);
        write_text((fs::path(*out_dir) / "plan.json").string(), to_json(p).dump(2) + "\n");
    }
    return p.admissible ? kExitOk : kExitVerifyFailed;
}

int cmd_simulate(const Overrides &o, const std::string &out_dir, std::ostream &out) {
    const auto started = std::chrono::steady_clock::now();
    RunSpec spec = resolve_spec(o);
    spec.validate();
    const TheoremPlan plan = resolve_plan(spec);
    spec.L = plan.L;
    spec.M = plan.M;
    const SimConfig cfg = spec.sim_config();
    const InitialData data{ProfileSpec(*spec.L, *spec.M, spec.R, spec.variant), spec.density_data(),
                           spec.velocity == "zero" ? 0.0 : 1.0};

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    fs::remove_all(dir / "snapshots");
    if (spec.snapshot_every > 0) fs::create_directories(dir / "snapshots");
    fs::remove(dir / "manifest.json");

    const RecordContext ctx{cfg.params, cfg.eps_support, static_cast<double>(plan.M), plan.sigma_tilde};
    DiagSeries series;
    std::vector<std::string> files;
    std::size_t observed = 0;
    bool last_written = false;
    auto snapshot = [&](const Field &f) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.csv", files.size());
        const std::string rel = std::string("snapshots/") + name;
        write_snapshot_csv((dir / rel).string(), f);
        files.push_back(rel);
    };
    const RunResult res = run(cfg, data, plan.sigma_tilde, [&](const Field &f) {
        series.push(record(f, ctx));
        last_written = spec.snapshot_every > 0 && observed % static_cast<std::size_t>(spec.snapshot_every) == 0;
        if (last_written) snapshot(f);
        ++observed;
    });
    if (spec.snapshot_every > 0 && !last_written) snapshot(res.final_field);

    write_series_csv((dir / "series.csv").string(), series.records());
    write_aux_csv((dir / "series_aux.csv").string(), series.records());
    write_text((dir / "plan.json").string(), to_json(plan).dump(2) + "\n");
    write_text((dir / "series.gp").string(), series_plot_script());
    std::vector<std::string> all{"series.csv", "series_aux.csv", "plan.json", "series.gp"};
    all.insert(all.end(), files.begin(), files.end());

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json m;
    m["config"] = to_json(spec);
    m["plan"] = to_json(plan);
    m["grid"] = {{"cells", res.final_field.grid.size()},
                 {"x_min", res.final_field.grid.x_min()},
                 {"x_max", res.final_field.grid.x_max()}};
    m["files"] = all;
    m["outcome"] = {{"kind", to_string(res.outcome)}, {"t", res.time},         {"x", res.x},
                    {"reason", res.reason},            {"steps", res.steps},   {"max_grad", res.max_grad}};
    m["records"] = series.size();
    m["wall_clock_seconds"] = wall;
    m["finished_at"] = utc_now();
    write_text((dir / "manifest.json").string(), m.dump(2) + "\n");

    out << "outcome      " << to_string(res.outcome) << " at t = " << num(res.time) << ", x = " << num(res.x)
        << "\nreason       " << res.reason << "\nsteps        " << res.steps << "\nrecords      " << series.size()
        << "\nmax |du/dx|  " << num(res.max_grad) << " (limit " << num(cfg.grad_limit()) << ")\n";
    if (plan.admissible && plan.t_star) out << "t*           " << num(*plan.t_star) << "\n";
    out << "output       " << dir.string() << "\n";
    return res.outcome == Outcome::BoundaryBreach ? kExitRuntime : kExitOk;
}

int cmd_verify(const std::string &run_dir, std::ostream &out) {
    const fs::path dir(run_dir);
    const nlohmann::json manifest = read_json((dir / "manifest.json").string());
    RunSpec spec;
    OutcomeInfo outcome;
    try {
        spec = run_spec_from_json(manifest.at("config"));
        const auto &oc = manifest.at("outcome");
        outcome.kind = oc.at("kind");
        outcome.t = oc.at("t");
        outcome.x = oc.at("x");
        outcome.reason = oc.at("reason");
        outcome.steps = oc.at("steps");
        outcome.max_grad = oc.at("max_grad");
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(std::string("manifest schema mismatch: ") + e.what());
    } catch (const ConfigError &e) {
        throw SchemaError(std::string("manifest schema mismatch: ") + e.what());
    }
    TheoremPlan plan;
    try {
        plan = plan_from_json(read_json((dir / "plan.json").string()));
    } catch (const PlanningError &e) {
        throw SchemaError(e.what());
    }
    auto records = read_series_csv((dir / "series.csv").string());
    const bool have_aux = fs::exists(dir / "series_aux.csv");
    if (have_aux) read_aux_csv((dir / "series_aux.csv").string(), records);

    const auto checks = verify_run(records, have_aux, plan, spec, outcome);
    bool ok = true;
    char line[512];
    std::snprintf(line, sizeof line, "%-20s %-6s %-14s %s\n", "check", "status", "worst_margin", "detail");
    out << line;
    for (const auto &c : checks) {
        const char *status = !c.applicable ? "n/a" : (c.pass ? "PASS" : "FAIL");
        if (c.applicable && !c.pass) ok = false;
        std::snprintf(line, sizeof line, "%-20s %-6s %-14s %s\n", c.name.c_str(), status,
                      c.applicable ? num(c.worst_margin, 6).c_str() : "-", c.detail.c_str());
        out << line;
    }
    out << "\noutcome      " << outcome.kind << " at t = " << num(outcome.t) << "\n"
        << "verdict      " << (ok ? "all applicable checks pass" : "verification failed") << "\n";
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_profile(const Overrides &o, double step, const std::string &out_dir, std::ostream &out) {
    const double L = o.L.value_or(2.0);
    const int M = o.M.value_or(8);
    const double R = o.R.value_or(1.0);
    const ProfileVariant variant = o.variant ? parse_profile_variant(*o.variant) : ProfileVariant::Corrected;
    const ProfileSpec spec(L, M, R, variant);
    if (!(step > 0.0)) throw ConfigError("step must be positive");
    const auto n = static_cast<std::size_t>(std::floor(2.0 * M / step + 1e-9)) + 1;
    std::vector<double> xs(n), us(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = -M + static_cast<double>(i) * step;
        us[i] = velocity_profile(spec, xs[i]);
    }
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_xy_csv((dir / "profile.csv").string(), "x", "u", xs, us);
    write_text((dir / "profile.gp").string(), "# gnuplot script for profile.csv\n"
                                              "set datafile separator ','\n"
                                              "set xlabel 'x'\nset ylabel 'u'\n"
                                              "plot 'profile.csv' using 1:2 with lines title 'u_{L,M}'\n");
    const double norm = profile_norm_sq(spec);
    const double bound = 2.0 * L * L * M;
    out << "rows         " << n << "\n"
        << "|u|^2        " << num(norm) << "\n"
        << "2 L^2 M      " << num(bound) << "\n"
        << "bound holds  " << (norm <= bound ? "yes" : "no") << "\n"
        << "output       " << (dir / "profile.csv").string() << ", " << (dir / "profile.gp").string() << "\n";
    return kExitOk;
}

} // namespace

TheoremPlan resolve_plan(const RunSpec &spec) {
    PlanPolicy policy = spec.policy;
    policy.variant = spec.variant;
    const DensityData density = spec.density_data();
    if (spec.L && spec.M) return evaluate_plan(spec.params(), density, *spec.L, *spec.M, policy);
    return plan(spec.params(), density, policy);
}

std::vector<CheckResult> verify_run(const std::vector<DiagRecord> &records, bool have_aux, const TheoremPlan &plan,
                                    const RunSpec &spec, const OutcomeInfo &outcome) {
    const SimConfig cfg = spec.sim_config();
    const double limit = cfg.grad_limit();
    std::vector<CheckResult> out;
    out.push_back(conservation_check(records));
    out.push_back(record_sanity_check(records));
    out.push_back(entropy_inequality_check(records));
    out.push_back(cone_check(records, plan, cfg.dx));
    out.push_back(s2_bound_check(records, plan));
    auto skipped = [](std::string name, std::string why) {
        CheckResult c;
        c.name = std::move(name);
        c.applicable = false;
        c.worst_margin = 0.0;
        c.detail = std::move(why);
        return c;
    };
    if (have_aux) {
        out.push_back(jensen_check(records));
        out.push_back(holder_check(records));
        out.push_back(f_derivative_check(records, limit));
    } else {
        for (const char *n : {"jensen", "holder", "f_derivative"}) out.push_back(skipped(n, "no auxiliary series"));
    }
    if (!plan.admissible) {
        for (const char *n : {"apriori", "envelope", "deadline"}) out.push_back(skipped(n, "not a theorem run"));
        return out;
    }
    const EnvelopeParams env = EnvelopeParams::from_plan(plan);
    out.push_back(apriori_check(records, env, limit));
    out.push_back(envelope_check(records, env, limit));
    if (outcome.kind == to_string(Outcome::BlowUp)) {
        out.push_back(deadline_check(outcome.t, plan));
    } else if (outcome.kind == to_string(Outcome::Completed) && plan.t_star && spec.t_end >= *plan.t_star) {
        CheckResult c = deadline_check(outcome.t, plan);
        c.pass = false;
        c.detail = "no blow-up detected by t* = " + num(*plan.t_star);
        out.push_back(c);
    } else {
        out.push_back(skipped("deadline", "run stopped before t* without detection (" + outcome.kind + ")"));
    }
    return out;
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Finite-volume simulator and blow-up verification harness for Euler flow with Maxwell relaxation",
                 "relaxfv"};
    app.require_subcommand(1);

    Overrides plan_o, sim_o, prof_o;
    std::optional<std::string> plan_out;
    std::string sim_out = "out";
    std::string verify_dir;
    std::string prof_out = ".";
    double step = 0.01;

    auto *plan_cmd = app.add_subcommand("plan", "choose L and M and check every admissibility inequality");
    add_common(plan_cmd, plan_o);
    plan_cmd->add_option("--out", plan_out, "directory for plan.json");

    auto *sim_cmd = app.add_subcommand("simulate", "run a configuration and write series, snapshots and manifest");
    add_common(sim_cmd, sim_o);
    sim_cmd->add_option("--out", sim_out, "output directory");

    auto *ver_cmd = app.add_subcommand("verify", "re-run every diagnostics check on simulate output");
    ver_cmd->add_option("--run", verify_dir, "directory written by simulate")->required();

    auto *prof_cmd = app.add_subcommand("profile", "sample the velocity profile u_{L,M}");
    add_common(prof_cmd, prof_o);
    prof_cmd->add_option("--step", step, "sample spacing");
    prof_cmd->add_option("--out", prof_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*plan_cmd) return cmd_plan(plan_o, plan_out, out);
        if (*sim_cmd) return cmd_simulate(sim_o, sim_out, out);
        if (*ver_cmd) return cmd_verify(verify_dir, out);
        if (*prof_cmd) return cmd_profile(prof_o, step, prof_out, out);
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PlanningError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace relaxfv
