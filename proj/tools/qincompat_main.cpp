// qincompat: incompatibility measure R of multi-parameter thermal estimation
// models, with closed-form transverse-field Ising analytics. Subcommands:
//   point    J, U, R and diagnostics of a single model point (JSON to stdout)
//   sweep    R over an (h, T) grid -> CSV + heatmap SVG
//   scaling  critical-scaling data + fit -> CSV, log-log SVG, fit JSON
//   oracle   randomized cross-path and pair-space verification suites
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qincompat/analysis.hpp"
#include "qincompat/io.hpp"
#include "qincompat/svg.hpp"
#include "qincompat/verification.hpp"

namespace fs = std::filesystem;
using namespace qincompat;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    double beta_zero_proxy = 1e4;
    double quad_tol = 1e-10;

    QuadOptions quad() const {
        QuadOptions q;
        q.abs_tol = quad_tol;
        return q;
    }
};

struct ConfigError : Error {
    using Error::Error;
};

Json load_config(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot load config: ") + e.what());
    }
}

ParamSet parse_params(const Json& model) {
    if (!model.contains("params")) return ParamSet::h_phi;
    const auto list = model.at("params").get<std::vector<std::string>>();
    if (list == std::vector<std::string>{"h", "phi"}) return ParamSet::h_phi;
    if (list == std::vector<std::string>{"beta", "h", "phi"}) return ParamSet::beta_h_phi;
    throw ConfigError("params must be [\"h\",\"phi\"] or [\"beta\",\"h\",\"phi\"]");
}

IsingPoint parse_ising_point(const Json& model, double beta_zero_proxy) {
    IsingPoint p;
    p.h = model.value("h", 0.0);
    p.phi = model.value("phi", 0.0);
    if (!model.contains("beta")) throw ConfigError("ising model needs \"beta\"");
    if (model.at("beta").is_string()) {
        if (model.at("beta").get<std::string>() != "zero-temperature")
            throw ConfigError("beta must be a number or \"zero-temperature\"");
        p.beta = beta_zero_proxy;
    } else {
        p.beta = model.at("beta").get<double>();
    }
    if (model.contains("size") && !model.at("size").is_string())
        p.modes = model.at("size").get<int>();
    else if (model.contains("size") && model.at("size").get<std::string>() != "thermodynamic")
        throw ConfigError("size must be an even integer or \"thermodynamic\"");
    return p;
}

std::vector<double> parse_axis(const Json& axis, bool default_log) {
    if (axis.is_array()) {
        auto v = axis.get<std::vector<double>>();
        if (v.empty()) throw ConfigError("grid axis list is empty");
        return v;
    }
    const double lo = axis.at("min").get<double>();
    const double hi = axis.at("max").get<double>();
    const int count = axis.at("count").get<int>();
    if (count < 1 || !(hi >= lo)) throw ConfigError("grid axis needs count >= 1 and max >= min");
    const std::string scale = axis.value("scale", default_log ? "log" : "linear");
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        if (scale == "log") {
            if (!(lo > 0.0)) throw ConfigError("log axis needs positive bounds");
            v[i] = std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo)));
        } else {
            v[i] = lo + t * (hi - lo);
        }
    }
    return v;
}

Json point_report(const EstimationResult& res) {
    Json out = estimation_to_json(res);
    Json flags = Json::array();
    if (res.rank_reduced) flags.push_back("rank_reduced");
    if (res.effective_rank == 0) flags.push_back("singular_quantum_part");
    if (res.effective_rank > 0) {
        const auto rc = robertson_check(res.J, res.U);
        out["robertson_margin"] = rc.margin;
        out["robertson_pass"] = rc.pass;
        const auto [j_supp, u_supp] = project_onto_support(res.J, res.U);
        const TildeZ tz = tilde_z(j_supp, u_supp);
        Json eigs = Json::array();
        for (Eigen::Index i = 0; i < tz.positivity_eigenvalues.size(); ++i)
            eigs.push_back(tz.positivity_eigenvalues[i]);
        out["tilde_z"] = cmatrix_to_json(tz.z);
        out["tilde_z_positivity_eigenvalues"] = eigs;
    }
    out["flags"] = flags;
    return out;
}

int cmd_point(const CommonOptions& opts) {
    const Json cfg = load_config(opts.config_path);
    if (!cfg.contains("model")) throw ConfigError("config needs a \"model\" object");
    const Json& model = cfg.at("model");
    const std::string type = model.value("type", "");

    EstimationResult res;
    if (type == "ising") {
        const IsingPoint p = parse_ising_point(model, opts.beta_zero_proxy);
        res = evaluate_point(p, parse_params(model), opts.quad());
    } else if (type == "generic") {
        if (!model.contains("hamiltonian") || !model.contains("derivatives"))
            throw ConfigError("generic model needs \"hamiltonian\" and \"derivatives\"");
        const HermitianOperator h(cmatrix_from_json(model.at("hamiltonian")));
        std::vector<HermitianOperator> dh;
        for (const Json& d : model.at("derivatives")) dh.emplace_back(cmatrix_from_json(d));
        if (dh.empty()) throw ConfigError("generic model needs at least one derivative");
        const double beta = model.value("beta", 1.0);
        std::vector<std::string> labels = model.value("labels", std::vector<std::string>{});
        res = estimate(thermal_state(h, beta), dh, std::move(labels));
        if (res.effective_rank == 0)
            throw SingularFisherError("Fisher matrix has effective rank zero; R undefined");
    } else {
        throw ConfigError("model type must be \"ising\" or \"generic\"");
    }

    std::cout << point_report(res).dump(2) << "\n";
    return 0;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

int cmd_sweep(const CommonOptions& opts) {
    const Json cfg = load_config(opts.config_path);
    if (!cfg.contains("grid")) throw ConfigError("sweep config needs a \"grid\" object");
    const Json& model = cfg.value("model", Json::object());

    SweepGrid grid;
    grid.h_values = parse_axis(cfg.at("grid").at("h"), false);
    grid.T_values = parse_axis(cfg.at("grid").at("T"), true);
    grid.selector = parse_params(model);
    if (model.contains("size") && !model.at("size").is_string())
        grid.modes = model.at("size").get<int>();

    const auto rows = sweep(grid, opts.quad(), opts.threads);

    ensure_out_dir(opts.out_dir);
    const std::string csv_path = (fs::path(opts.out_dir) / "sweep.csv").string();
    const std::string svg_path = (fs::path(opts.out_dir) / "sweep.svg").string();
    write_csv(sweep_to_csv(rows, grid.selector), csv_path);
    const std::string title = grid.selector == ParamSet::h_phi ? "R(h, phi)" : "R(beta, h, phi)";
    write_text_file(svg_path, heatmap_svg(rows, grid.h_values, grid.T_values, title));

    int failures = 0;
    for (const auto& row : rows)
        if (!row.error.empty()) ++failures;
    std::cout << "sweep: " << rows.size() << " points, " << failures << " failed; wrote "
              << csv_path << " and " << svg_path << "\n";
    return failures == static_cast<int>(rows.size()) && !rows.empty() ? 3 : 0;
}

std::vector<std::pair<double, double>> scaling_data(const Json& cfg, const CommonOptions& opts,
                                                    std::string& x_name) {
    std::vector<std::pair<double, double>> data;
    if (cfg.contains("data_csv")) {
        const CsvTable table = read_csv(cfg.at("data_csv").get<std::string>());
        x_name = cfg.value("x_column", "T");
        const auto x = table.numeric_column(x_name);
        const auto y = table.numeric_column(cfg.value("y_column", "R"));
        for (std::size_t i = 0; i < x.size(); ++i) data.emplace_back(x[i], y[i]);
    } else if (cfg.value("scan", "") == "temperature") {
        x_name = "T";
        const double h = cfg.value("h", 1.0);
        for (double t : parse_axis(cfg.at("T"), true)) {
            IsingPoint p;
            p.h = h;
            p.beta = 1.0 / t;
            data.emplace_back(t, evaluate_point(p, parse_params(cfg), opts.quad()).R);
        }
    } else if (cfg.value("scan", "") == "field") {
        x_name = "h_tilde";
        const bool above = cfg.value("side", "below") == "above";
        // "analytic" evaluates the exact T = 0 closed form; the beta proxy
        // is only reliable for h_tilde well above the proxy temperature
        const bool proxy = cfg.value("method", "analytic") == "proxy";
        for (double ht : parse_axis(cfg.at("h_tilde"), true)) {
            const double h = above ? 1.0 + ht : 1.0 - ht;
            if (proxy) {
                IsingPoint p;
                p.h = h;
                p.beta = opts.beta_zero_proxy;
                data.emplace_back(ht, evaluate_point(p, parse_params(cfg), opts.quad()).R);
            } else {
                data.emplace_back(ht, zero_t_analytic(h).r0);
            }
        }
    } else {
        throw ConfigError("scaling config needs \"data_csv\" or \"scan\": temperature|field");
    }

    if (cfg.contains("window")) {
        const auto w = cfg.at("window").get<std::vector<double>>();
        if (w.size() != 2) throw ConfigError("window must be [lo, hi]");
        std::vector<std::pair<double, double>> filtered;
        for (const auto& [x, y] : data)
            if (x >= w[0] && x <= w[1]) filtered.emplace_back(x, y);
        data = std::move(filtered);
    }
    return data;
}

int cmd_scaling(const CommonOptions& opts) {
    const Json cfg = load_config(opts.config_path);
    std::string x_name = "x";
    const auto data = scaling_data(cfg, opts, x_name);
    if (data.empty()) throw ConfigError("scaling dataset is empty");

    const std::string form = cfg.value("form", "fixed");
    ScalingFit fit;
    if (form == "fixed") {
        fit = fit_fixed_form(data);
    } else if (form == "log_power") {
        fit = fit_log_power(data, cfg.value("log_arg_scale", critical_log_scale()));
    } else {
        throw ConfigError("form must be \"fixed\" or \"log_power\"");
    }

    ensure_out_dir(opts.out_dir);
    CsvTable table;
    table.comments = {"qincompat-scaling v1", "form=" + form};
    table.columns = {x_name, "R"};
    for (const auto& [x, y] : data)
        table.rows.push_back({format_double(x), format_double(y)});
    const std::string csv_path = (fs::path(opts.out_dir) / "scaling.csv").string();
    write_csv(table, csv_path);

    const ScalingFit f = fit;
    auto curve = [f](double x) {
        return f.amplitude * std::pow(std::log(f.log_arg_scale / x) + f.log_offset, f.log_power) *
               std::pow(x, f.power);
    };
    const std::string svg_path = (fs::path(opts.out_dir) / "scaling.svg").string();
    write_text_file(svg_path, loglog_svg(data, curve, x_name, "critical scaling of R"));

    const std::string fit_path = (fs::path(opts.out_dir) / "fit.json").string();
    write_text_file(fit_path, scaling_fit_to_json(fit).dump(2) + "\n");

    std::cout << scaling_fit_to_json(fit).dump(2) << "\n";
    return 0;
}

int cmd_oracle(int models, int tuples, std::uint64_t seed) {
    const CrossPathReport cross = run_cross_path_suite(models, seed);
    const PairOracleReport pair = run_pair_oracle_suite(tuples, seed + 1);

    const bool cross_ok = cross.max_j_dev <= 1e-8 && cross.max_u_dev <= 1e-8 &&
                          cross.max_sf_dev <= 1e-8 && cross.min_r >= 0.0 &&
                          cross.max_r <= 1.0 + 1e-9 && cross.min_robertson >= -1e-10 &&
                          cross.min_tilde_eig >= -1e-10 && cross.max_reparam_dev <= 1e-10 &&
                          cross.max_unbiased_dev <= 1e-9;
    const bool pair_ok = pair.max_dev <= 1e-9;

    Json out;
    out["cross_path"] = {{"models", cross.models},
                         {"max_j_deviation", cross.max_j_dev},
                         {"max_u_deviation", cross.max_u_dev},
                         {"max_structure_factor_deviation", cross.max_sf_dev},
                         {"r_range", Json::array({cross.min_r, cross.max_r})},
                         {"min_robertson_margin", cross.min_robertson},
                         {"min_tilde_z_eigenvalue", cross.min_tilde_eig},
                         {"max_reparametrization_deviation", cross.max_reparam_dev},
                         {"max_unbiasedness_residue", cross.max_unbiased_dev},
                         {"pass", cross_ok}};
    out["pair_space"] = {{"tuples", pair.tuples}, {"max_deviation", pair.max_dev}, {"pass", pair_ok}};
    std::cout << out.dump(2) << "\n";
    return cross_ok && pair_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum incompatibility of thermal multi-parameter estimation models"};
    app.require_subcommand(1);

    CommonOptions opts;
    int oracle_models = 200, oracle_tuples = 50;
    std::uint64_t oracle_seed = 20240915;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", opts.config_path, "JSON configuration file")->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--threads", opts.threads, "worker threads (default: hardware)")
            ->envname("QINCOMPAT_THREADS");
        cmd->add_option("--beta-zero-proxy", opts.beta_zero_proxy,
                        "inverse temperature standing in for T = 0");
        cmd->add_option("--quad-tol", opts.quad_tol, "quadrature tolerance per matrix entry");
    };

    CLI::App* point = app.add_subcommand("point", "evaluate one model point");
    add_common(point, true);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "R over an (h, T) grid");
    add_common(sweep_cmd, true);
    CLI::App* scaling = app.add_subcommand("scaling", "critical-scaling data and fits");
    add_common(scaling, true);
    CLI::App* oracle = app.add_subcommand("oracle", "randomized verification suites");
    add_common(oracle, false);
    oracle->add_option("--models", oracle_models, "random models for the cross-path suite");
    oracle->add_option("--tuples", oracle_tuples, "random tuples for the pair-space suite");
    oracle->add_option("--seed", oracle_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(point)) return cmd_point(opts);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(opts);
        if (app.got_subcommand(scaling)) return cmd_scaling(opts);
        if (app.got_subcommand(oracle)) return cmd_oracle(oracle_models, oracle_tuples, oracle_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
