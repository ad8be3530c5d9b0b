#include "relaxfv/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <functional>
#include <map>

namespace relaxfv {

namespace pt = boost::property_tree;

DensityData RunSpec::density_data() const {
    if (density == "uniform") return uniform_density(R);
    if (density == "bump") return bump_density(bump_rho, bump_stress, R);
    throw ConfigError("unknown density '" + density + "' (expected uniform or bump)");
}

SimConfig RunSpec::sim_config() const {
    SimConfig c;
    c.params = params();
    c.dx = dx;
    c.domain_margin = domain_margin;
    c.cfl = cfl;
    c.t_end = t_end;
    c.order = order;
    c.limiter = limiter;
    c.coupling = coupling;
    c.splitting = splitting;
    c.output_dt = output_dt;
    c.eps_support = eps_support;
    c.grad_jump = grad_jump;
    c.min_rho = min_rho;
    c.breach_cells = static_cast<std::size_t>(breach_cells);
    return c;
}

void RunSpec::validate() const {
    (void)params();
    sim_config().validate();
    if (velocity != "profile" && velocity != "zero")
        throw ConfigError("unknown velocity '" + velocity + "' (expected profile or zero)");
    if (L.has_value() != M.has_value()) throw ConfigError("L and M must be given together (or both omitted)");
    if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
    if (breach_cells < 1) throw ConfigError("breach_cells must be at least 1");
    if (!(R > 0.0)) throw ConfigError("R must be positive");
    (void)density_data();
}

namespace {

template <class T> T get_as(const pt::ptree &node, const std::string &key) {
    try {
        return node.get_value<T>();
    } catch (const pt::ptree_bad_data &) {
        throw ConfigError("bad value '" + node.data() + "' for " + key);
    }
}

// ptree's int conversion accepts "2.5" as 2; reject anything non-integral.
int get_int(const pt::ptree &node, const std::string &key) {
    const double v = get_as<double>(node, key);
    if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("integer expected for " + key);
    return static_cast<int>(v);
}

} // namespace

RunSpec load_run_spec(const std::string &path) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path);
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    RunSpec s;
    using Setter = std::function<void(const pt::ptree &, const std::string &)>;
    auto dbl = [](double &dst) -> Setter {
        return [&dst](const pt::ptree &n, const std::string &k) { dst = get_as<double>(n, k); };
    };
    auto integer = [](int &dst) -> Setter {
        return [&dst](const pt::ptree &n, const std::string &k) { dst = get_int(n, k); };
    };
    auto str = [](std::string &dst) -> Setter {
        return [&dst](const pt::ptree &n, const std::string &) { dst = n.data(); };
    };
    const std::map<std::string, std::map<std::string, Setter>> table{
        {"model", {{"gamma", dbl(s.gamma)}, {"tau", dbl(s.tau)}}},
        {"grid", {{"dx", dbl(s.dx)}, {"cfl", dbl(s.cfl)}, {"domain_margin", dbl(s.domain_margin)}}},
        {"run",
         {{"t_end", dbl(s.t_end)},
          {"order", integer(s.order)},
          {"splitting", [&s](const pt::ptree &n, const std::string &) { s.splitting = parse_splitting(n.data()); }},
          {"limiter", [&s](const pt::ptree &n, const std::string &) { s.limiter = parse_limiter(n.data()); }},
          {"coupling", [&s](const pt::ptree &n, const std::string &) { s.coupling = parse_coupling(n.data()); }},
          {"output_dt", dbl(s.output_dt)},
          {"snapshot_every", integer(s.snapshot_every)}}},
        {"data",
         {{"velocity", str(s.velocity)},
          {"L", [&s](const pt::ptree &n, const std::string &k) { s.L = get_as<double>(n, k); }},
          {"M", [&s](const pt::ptree &n, const std::string &k) { s.M = get_int(n, k); }},
          {"R", dbl(s.R)},
          {"profile_variant",
           [&s](const pt::ptree &n, const std::string &) { s.variant = parse_profile_variant(n.data()); }},
          {"density", str(s.density)},
          {"bump_rho", dbl(s.bump_rho)},
          {"bump_stress", dbl(s.bump_stress)}}},
        {"diagnostics",
         {{"eps_support", dbl(s.eps_support)},
          {"grad_jump", dbl(s.grad_jump)},
          {"min_rho", dbl(s.min_rho)},
          {"breach_cells", integer(s.breach_cells)}}},
        {"plan",
         {{"margin", dbl(s.policy.margin)},
          {"max_L", integer(s.policy.max_L)},
          {"max_M", integer(s.policy.max_M)},
          {"resolution", integer(s.policy.resolution)}}},
    };
    for (const auto &[section, body] : tree) {
        const auto sec = table.find(section);
        if (sec == table.end()) throw ConfigError("unknown config section [" + section + "]");
        for (const auto &[key, node] : body) {
            const auto it = sec->second.find(key);
            if (it == sec->second.end()) throw ConfigError("unknown config key " + section + "." + key);
            it->second(node, section + "." + key);
        }
    }
    return s;
}

nlohmann::json to_json(const RunSpec &s) {
    nlohmann::json j;
    j["model"] = {{"gamma", s.gamma}, {"tau", s.tau}};
    j["grid"] = {{"dx", s.dx}, {"cfl", s.cfl}, {"domain_margin", s.domain_margin}};
    j["run"] = {{"t_end", s.t_end},
                {"order", s.order},
                {"splitting", to_string(s.splitting)},
                {"limiter", to_string(s.limiter)},
                {"coupling", to_string(s.coupling)},
                {"output_dt", s.output_dt},
                {"snapshot_every", s.snapshot_every}};
    j["data"] = {{"velocity", s.velocity},
                 {"L", s.L ? nlohmann::json(*s.L) : nlohmann::json(nullptr)},
                 {"M", s.M ? nlohmann::json(*s.M) : nlohmann::json(nullptr)},
                 {"R", s.R},
                 {"profile_variant", to_string(s.variant)},
                 {"density", s.density},
                 {"bump_rho", s.bump_rho},
                 {"bump_stress", s.bump_stress}};
    j["diagnostics"] = {{"eps_support", s.eps_support},
                        {"grad_jump", s.grad_jump},
                        {"min_rho", s.min_rho},
                        {"breach_cells", s.breach_cells}};
    j["plan"] = {{"margin", s.policy.margin},
                 {"max_L", s.policy.max_L},
                 {"max_M", s.policy.max_M},
                 {"resolution", s.policy.resolution}};
    return j;
}

RunSpec run_spec_from_json(const nlohmann::json &j) {
    try {
        RunSpec s;
        s.gamma = j.at("model").at("gamma");
        s.tau = j.at("model").at("tau");
        s.dx = j.at("grid").at("dx");
        s.cfl = j.at("grid").at("cfl");
        s.domain_margin = j.at("grid").at("domain_margin");
        const auto &r = j.at("run");
        s.t_end = r.at("t_end");
        s.order = r.at("order");
        s.splitting = parse_splitting(r.at("splitting"));
        s.limiter = parse_limiter(r.at("limiter"));
        s.coupling = parse_coupling(r.at("coupling"));
        s.output_dt = r.at("output_dt");
        s.snapshot_every = r.at("snapshot_every");
        const auto &d = j.at("data");
        s.velocity = d.at("velocity");
        if (!d.at("L").is_null()) s.L = d.at("L").get<double>();
        if (!d.at("M").is_null()) s.M = d.at("M").get<int>();
        s.R = d.at("R");
        s.variant = parse_profile_variant(d.at("profile_variant"));
        s.density = d.at("density");
        s.bump_rho = d.at("bump_rho");
        s.bump_stress = d.at("bump_stress");
        const auto &g = j.at("diagnostics");
        s.eps_support = g.at("eps_support");
        s.grad_jump = g.at("grad_jump");
        s.min_rho = g.at("min_rho");
        s.breach_cells = g.at("breach_cells");
        const auto &p = j.at("plan");
        s.policy.margin = p.at("margin");
        s.policy.max_L = p.at("max_L");
        s.policy.max_M = p.at("max_M");
        s.policy.resolution = p.at("resolution");
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed config echo: ") + e.what());
    }
}

} // namespace relaxfv
