// Command-line front end: oracle / psi / truncation / solve / study.
//
// Exit codes: 0 ok, 2 precondition warning treated as error,
// 3 numeric failure, 4 parse failure.

#include "polyext/extension.hpp"
#include "polyext/solve.hpp"
#include "polyext/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr const char* kVersion = "polyext 1.0.0";

struct RunConfig {
    std::string s = "1.5";
    std::string f = "1:1";
    std::string domain = "interval";
    std::string Y = "1.5";
    std::string gamma = "2";
    std::string Nx = "16";
    std::string M = "16";
    std::size_t K = 0;
    std::string out = "polyext_out";
    bool dump_matrices = false;
    bool allow_small_y = false;

    bool operator==(const RunConfig&) const = default;
};

json config_to_json(const RunConfig& c)
{
    return json{{"s", c.s},           {"f", c.f},
                {"domain", c.domain}, {"Y", c.Y},
                {"gamma", c.gamma},   {"Nx", c.Nx},
                {"M", c.M},           {"K", c.K},
                {"out", c.out},       {"dump-matrices", c.dump_matrices},
                {"allow-small-Y", c.allow_small_y}};
}

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    c.s = j.at("s").get<std::string>();
    c.f = j.at("f").get<std::string>();
    c.domain = j.at("domain").get<std::string>();
    c.Y = j.at("Y").get<std::string>();
    c.gamma = j.at("gamma").get<std::string>();
    c.Nx = j.at("Nx").get<std::string>();
    c.M = j.at("M").get<std::string>();
    c.K = j.at("K").get<std::size_t>();
    c.out = j.at("out").get<std::string>();
    c.dump_matrices = j.at("dump-matrices").get<bool>();
    c.allow_small_y = j.at("allow-small-Y").get<bool>();
    return c;
}

// Flat key=value config file; '#' starts a comment.  Flags override.
void apply_config_file(const std::string& path, RunConfig& c)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string{};
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "s") c.s = val;
        else if (key == "f") c.f = val;
        else if (key == "domain") c.domain = val;
        else if (key == "Y") c.Y = val;
        else if (key == "gamma") c.gamma = val;
        else if (key == "Nx") c.Nx = val;
        else if (key == "M") c.M = val;
        else if (key == "K") c.K = std::stoul(val);
        else if (key == "out") c.out = val;
        else if (key == "dump-matrices") c.dump_matrices = (val == "true" || val == "1");
        else if (key == "allow-small-Y") c.allow_small_y = (val == "true" || val == "1");
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
}

std::vector<double> parse_list_d(const std::string& text, const char* what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t end;
            out.push_back(std::stod(item, &end));
            if (end != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("bad value for ") + what + ": '" +
                                        item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty list for ") + what);
    return out;
}

std::vector<std::size_t> parse_list_u(const std::string& text, const char* what)
{
    std::vector<std::size_t> out;
    for (double v : parse_list_d(text, what)) {
        if (v < 1 || v != std::floor(v))
            throw std::invalid_argument(std::string("bad integer for ") + what);
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

double parse_scalar_d(const std::string& text, const char* what)
{
    const auto v = parse_list_d(text, what);
    if (v.size() != 1)
        throw std::invalid_argument(std::string(what) + ": expected a single value");
    return v.front();
}

std::size_t parse_scalar_u(const std::string& text, const char* what)
{
    const auto v = parse_list_u(text, what);
    if (v.size() != 1)
        throw std::invalid_argument(std::string(what) + ": expected a single value");
    return v.front();
}

void add_common_flags(CLI::App* cmd, RunConfig& c, std::string& config_path)
{
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--s", c.s, "fractional order s in (1,2); study: comma list");
    cmd->add_option("--f", c.f, "spectral data, `k:coeff` entries (`k,l:coeff` on the square)");
    cmd->add_option("--domain", c.domain, "interval | square (square: oracle only)");
    cmd->add_option("--Y", c.Y, "cylinder truncation height; study: comma list");
    cmd->add_option("--gamma", c.gamma, "y-mesh grading exponent >= 1; study: comma list");
    cmd->add_option("--Nx", c.Nx, "x cells; study: comma list");
    cmd->add_option("--M", c.M, "y cells; study: comma list");
    cmd->add_option("--K", c.K, "trace-norm mode cutoff (0: automatic)");
    cmd->add_option("--out", c.out, "output path prefix");
    cmd->add_flag("--dump-matrices", c.dump_matrices, "write coordinate-format matrix dumps");
    cmd->add_flag("--allow-small-Y", c.allow_small_y, "permit Y < 1/sqrt(lambda_1)");
}

void write_sidecar(const RunConfig& c, const json& extra)
{
    json j{{"version", kVersion}, {"seed", 0}, {"config", config_to_json(c)}};
    if (!extra.is_null()) j.update(extra);
    std::ofstream out(c.out + ".meta.json");
    out << j.dump(2) << '\n';
}

polyext::EigenBasis basis_for(const RunConfig& c)
{
    if (c.domain == "interval") return polyext::EigenBasis::interval();
    if (c.domain == "square") return polyext::EigenBasis::square();
    throw std::invalid_argument("domain must be 'interval' or 'square'");
}

// Y >= 1/sqrt(lambda_1) precondition; returns true when the run may proceed.
bool check_small_y(const RunConfig& c, double Y)
{
    const double ymin = 1.0 / std::numbers::pi; // interval: sqrt(lambda_1) = pi
    if (Y >= ymin || c.allow_small_y) return true;
    std::fprintf(stderr,
                 "warning: Y = %.17g is below 1/sqrt(lambda_1) = %.17g "
                 "(pass --allow-small-Y to proceed)\n",
                 Y, ymin);
    return false;
}

int cmd_oracle(const RunConfig& c)
{
    const auto basis = basis_for(c);
    const auto ord = polyext::make_frac_order(parse_scalar_d(c.s, "s"));
    const auto f = polyext::parse_spectral(c.f, basis);
    const auto u = polyext::oracle_solve(f, ord);

    std::ofstream csv(c.out + ".csv");
    csv << "k,F_k,U_k\n";
    char buf[160];
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", f.coeffs()[i].first,
                      f.coeffs()[i].second, u.coeffs()[i].second);
        csv << buf;
    }
    const double nf = polyext::hs_norm(f, -ord.s);
    const double nu = polyext::hs_norm(u, ord.s);
    std::printf("|f|_{H^-s} = %.17g\n|u|_{H^s}  = %.17g\n", nf, nu);
    write_sidecar(c, json{{"norm_f_minus_s", nf}, {"norm_u_s", nu}});
    return 0;
}

int cmd_psi(const RunConfig& c, double zmax, int samples)
{
    const auto ord = polyext::make_frac_order(parse_scalar_d(c.s, "s"));
    std::ofstream csv(c.out + ".csv");
    csv << "z,psi,ode_residual\n";
    char buf[160];
    for (int i = 0; i <= samples; ++i) {
        const double z = zmax * i / samples;
        const double p = polyext::psi(ord, z);
        const double r = z > 0.0 ? polyext::kernel_ode_residual(ord, z) : 0.0;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", z, p, r);
        csv << buf;
    }
    write_sidecar(c, json{});
    return 0;
}

int cmd_truncation(const RunConfig& c)
{
    const auto ord = polyext::make_frac_order(parse_scalar_d(c.s, "s"));
    const double Y = parse_scalar_d(c.Y, "Y");
    const auto f = polyext::parse_spectral(c.f, basis_for(c));
    const bool proceed = check_small_y(c, Y);
    const auto table = polyext::truncation_report(f, ord, Y);

    std::ofstream csv(c.out + ".csv");
    polyext::write_decay_csv(csv, table);
    std::printf("tail_norm = %.17g\nsup_I_tail = %.17g\nbound = %.17g\n",
                table.tail_norm, table.sup_i_tail, table.bound);
    write_sidecar(c, json{{"tail_norm", table.tail_norm},
                          {"sup_I_tail", table.sup_i_tail},
                          {"bound", table.bound}});
    return proceed ? 0 : 2;
}

int cmd_solve(const RunConfig& c)
{
    if (c.domain != "interval")
        throw std::invalid_argument("solve: only domain=interval is supported");
    polyext::RunParams p;
    p.s = parse_scalar_d(c.s, "s");
    p.Y = parse_scalar_d(c.Y, "Y");
    p.gamma = parse_scalar_d(c.gamma, "gamma");
    p.Nx = parse_scalar_u(c.Nx, "Nx");
    p.M = parse_scalar_u(c.M, "M");
    p.K = c.K;
    p.fspec = c.f;
    if (!check_small_y(c, p.Y)) return 2;

    const auto o = polyext::solve_problem(p);
    {
        std::ofstream sol_csv(c.out + "_solution.csv");
        polyext::write_solution_csv(sol_csv, o.sys, o.sol);
        std::ofstream tr_csv(c.out + "_trace.csv");
        polyext::write_trace_csv(tr_csv, o.tr);
    }
    if (c.dump_matrices) {
        const auto dump = [&](const char* name, const polyext::SparseMat& m) {
            std::ofstream f(c.out + "_" + name + ".mtx");
            polyext::write_coordinate(f, m);
        };
        dump("Mx", o.sys.fx.M);
        dump("Kx", o.sys.fx.K);
        dump("Dx", o.sys.fx.D);
        dump("My", o.sys.fy.M);
        dump("Cy", o.sys.fy.C);
        dump("By", o.sys.fy.B);
        dump("A", o.sys.A);
    }
    std::printf("err_hs = %.17g\nerr_l2 = %.17g\nenergy = %.17g\nresidual = %.17g\n",
                o.errors.err_hs, o.errors.err_l2, o.energy, o.sol.residual);
    write_sidecar(c, json{{"err_hs", o.errors.err_hs},
                          {"err_l2", o.errors.err_l2},
                          {"l2_tail", o.errors.l2_tail},
                          {"energy", o.energy},
                          {"residual", o.sol.residual}});
    return 0;
}

int cmd_study(const RunConfig& c)
{
    if (c.domain != "interval")
        throw std::invalid_argument("study: only domain=interval is supported");
    const auto svals = parse_list_d(c.s, "s");
    const auto yvals = parse_list_d(c.Y, "Y");
    const auto gvals = parse_list_d(c.gamma, "gamma");
    const auto nxvals = parse_list_u(c.Nx, "Nx");
    const auto mvals = parse_list_u(c.M, "M");

    for (double Y : yvals)
        if (!check_small_y(c, Y)) return 2;

    // Equal-length Nx and M lists sweep the diagonal; otherwise the product.
    std::vector<std::pair<std::size_t, std::size_t>> meshes;
    if (nxvals.size() == mvals.size())
        for (std::size_t i = 0; i < nxvals.size(); ++i)
            meshes.emplace_back(nxvals[i], mvals[i]);
    else
        for (auto nx : nxvals)
            for (auto m : mvals) meshes.emplace_back(nx, m);

    std::vector<polyext::RunParams> plan;
    for (double s : svals)
        for (double Y : yvals)
            for (double g : gvals)
                for (const auto& [nx, m] : meshes)
                    plan.push_back({s, Y, g, nx, m, c.K, c.f});

    const auto records = polyext::run_study(plan);
    {
        std::ofstream csv(c.out + ".csv");
        polyext::write_study_csv(csv, records);
    }
    json extra{{"runs", records.size()}};
    if (yvals.size() >= 2 && svals.size() == 1 && gvals.size() == 1 &&
        meshes.size() == 1)
        extra["fitted_y_slope"] = polyext::fit_y_slope(records);
    write_sidecar(c, extra);

    bool all_ok = true;
    for (const auto& r : records) {
        if (!r.ok) {
            std::fprintf(stderr, "run failed (s=%g Y=%g Nx=%zu M=%zu): %s\n", r.params.s,
                         r.params.Y, r.params.Nx, r.params.M, r.error.c_str());
            all_ok = false;
        }
    }
    return all_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral fractional Laplacian (s in (1,2)) via the polyharmonic "
                 "extension: exact oracle, truncation reports, weighted C^1 tensor FEM"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    double zmax = 10.0;
    int samples = 200;

    auto* oracle = app.add_subcommand("oracle", "exact spectral solve u = L^{-s} f");
    auto* psi = app.add_subcommand("psi", "tabulate the kernel psi and its ODE residual");
    auto* trunc = app.add_subcommand("truncation", "per-mode decay integrals and tail norm");
    auto* solve = app.add_subcommand("solve", "tensor FEM solve on the truncated cylinder");
    auto* study = app.add_subcommand("study", "convergence study over a parameter grid");
    for (auto* cmd : {oracle, psi, trunc, solve, study})
        add_common_flags(cmd, cfg, config_path);
    psi->add_option("--zmax", zmax, "tabulation endpoint");
    psi->add_option("--samples", samples, "number of sample intervals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 4;
    }

    try {
        // Flags win over the config file: re-parse flags after loading it.
        if (!config_path.empty()) {
            RunConfig file_cfg;
            apply_config_file(config_path, file_cfg);
            RunConfig flag_cfg = cfg;
            // Start from file values, then overlay every flag the user passed.
            auto* active = app.get_subcommands().front();
            const auto passed = [&](const std::string& name) {
                return active->count(name) > 0;
            };
            RunConfig merged = file_cfg;
            if (passed("--s")) merged.s = flag_cfg.s;
            if (passed("--f")) merged.f = flag_cfg.f;
            if (passed("--domain")) merged.domain = flag_cfg.domain;
            if (passed("--Y")) merged.Y = flag_cfg.Y;
            if (passed("--gamma")) merged.gamma = flag_cfg.gamma;
            if (passed("--Nx")) merged.Nx = flag_cfg.Nx;
            if (passed("--M")) merged.M = flag_cfg.M;
            if (passed("--K")) merged.K = flag_cfg.K;
            if (passed("--out")) merged.out = flag_cfg.out;
            if (passed("--dump-matrices")) merged.dump_matrices = flag_cfg.dump_matrices;
            if (passed("--allow-small-Y")) merged.allow_small_y = flag_cfg.allow_small_y;
            cfg = merged;
        }

        if (oracle->parsed()) return cmd_oracle(cfg);
        if (psi->parsed()) return cmd_psi(cfg, zmax, samples);
        if (trunc->parsed()) return cmd_truncation(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (study->parsed()) return cmd_study(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 4;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
