// SPDX-License-Identifier: Apache-2.0
//
// wbop - wideband array manifolds and correlation-shaping operator design
// Copyright (C) 2026 wbop contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: synthesize steering grids, design the shaping
// operator, evaluate correlation maps and report side-lobe levels. All data
// goes to files or standard output; progress goes to standard error.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data or dimension
// error, 4 I/O error.

#include "wbop/correlation.hpp"
#include "wbop/design.hpp"
#include "wbop/errors.hpp"
#include "wbop/manifold.hpp"
#include "wbop/multiway.hpp"
#include "wbop/persist.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace
{

using nlohmann::json;

struct GlobalFlags
{
    std::optional<std::uint64_t> seed;
    std::string config_path;
    unsigned threads = 1;
    bool quiet = false;
};

// Everything needed to rebuild the manifold that produced a steering grid,
// stored next to the tensor as <out>.json.
json sidecar_from(const wbop::RunConfig &cfg, const std::string &band,
                  const std::vector<double> &angles)
{
    const wbop::FrequencyGrid grid = band == "target" ? cfg.target_grid() : cfg.input_grid();
    json j;
    j["kind"] = "steering_grid";
    j["band"] = band;
    j["n_elements"] = cfg.n_elements;
    j["spacing_m"] = cfg.spacing_m;
    j["pattern"] = cfg.pattern.kind == wbop::ElementPattern::Kind::patch ? "patch" : "isotropic";
    j["patch_exponent"] = cfg.pattern.exponent;
    j["carrier_hz"] = grid.carrier_hz();
    j["bandwidth_hz"] = grid.bandwidth_hz();
    j["n_points"] = grid.n_points();
    j["normalize"] = cfg.normalize;
    j["angles"] = angles;
    return j;
}

std::filesystem::path sidecar_path(const std::filesystem::path &tensor_path)
{
    std::filesystem::path p = tensor_path;
    p += ".json";
    return p;
}

void write_sidecar(const std::filesystem::path &tensor_path, const json &j)
{
    std::ofstream out(sidecar_path(tensor_path));
    if (!out)
        throw wbop::io_error("cannot open " + sidecar_path(tensor_path).string() +
                             " for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw wbop::io_error("write failure on " + sidecar_path(tensor_path).string());
}

json read_sidecar(const std::filesystem::path &tensor_path)
{
    std::ifstream in(sidecar_path(tensor_path));
    if (!in)
        throw wbop::io_error("cannot open manifold sidecar " +
                             sidecar_path(tensor_path).string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw wbop::dimension_error("manifold sidecar is not valid JSON: " +
                                    std::string(e.what()));
    }
    return j;
}

wbop::WidebandManifold manifold_from_sidecar(const json &j)
{
    try
    {
        const wbop::ElementPattern pattern =
            j.at("pattern").get<std::string>() == "patch"
                ? wbop::ElementPattern::make_patch(j.at("patch_exponent").get<double>())
                : wbop::ElementPattern::make_isotropic();
        const wbop::FrequencyGrid grid(j.at("carrier_hz").get<double>(),
                                       j.at("bandwidth_hz").get<double>(),
                                       j.at("n_points").get<std::size_t>());
        const wbop::RingArrayGeometry geometry(j.at("n_elements").get<std::size_t>(),
                                               j.at("spacing_m").get<double>());
        return {geometry, pattern, grid, j.at("normalize").get<bool>()};
    }
    catch (const json::exception &e)
    {
        throw wbop::dimension_error("manifold sidecar is missing fields: " +
                                    std::string(e.what()));
    }
}

std::vector<double> angles_from_sidecar(const json &j)
{
    try
    {
        return j.at("angles").get<std::vector<double>>();
    }
    catch (const json::exception &e)
    {
        throw wbop::dimension_error("manifold sidecar is missing the angle grid: " +
                                    std::string(e.what()));
    }
}

wbop::RunConfig load_config(const GlobalFlags &g)
{
    if (g.config_path.empty())
        throw wbop::config_error("--config: this subcommand needs a configuration file");
    wbop::RunConfig cfg = wbop::parse_config(g.config_path);
    if (g.seed)
        cfg.design.seed = *g.seed;
    return cfg;
}

int run_manifold(const GlobalFlags &g, const std::string &out, std::size_t n_angles,
                 const std::string &band)
{
    const wbop::RunConfig cfg = load_config(g);
    const wbop::WidebandManifold manifold =
        band == "target" ? cfg.target_manifold() : cfg.input_manifold();
    const std::vector<double> angles = wbop::default_angle_grid(n_angles);
    const wbop::ComplexMultiArray grid = wbop::steering_grid(manifold, angles, g.threads);
    wbop::write_tensor(out, grid);
    write_sidecar(out, sidecar_from(cfg, band, angles));
    if (!g.quiet)
        std::cerr << "wrote steering grid " << grid.dims()[0] << "x" << grid.dims()[1] << "x"
                  << grid.dims()[2] << " (" << band << " band) to " << out << "\n";
    return 0;
}

int run_design(const GlobalFlags &g, const std::string &out, std::string log_path)
{
    const wbop::RunConfig cfg = load_config(g);
    if (log_path.empty())
        log_path = out + ".log.csv";
    const std::filesystem::path checkpoint = out + ".checkpoint";

    const wbop::WidebandManifold input = cfg.input_manifold();
    const wbop::WidebandManifold target = cfg.target_manifold();

    const auto sink = [&](const wbop::TrainingRecord &rec, const wbop::ComplexMultiArray &phi)
    {
        wbop::write_tensor(checkpoint, phi);
        if (!g.quiet)
            std::cerr << "iter " << rec.iteration << "/" << cfg.design.iterations
                      << "  batch=" << rec.batch_objective
                      << "  heldout=" << rec.heldout_objective << "\n";
    };

    const wbop::DesignResult result =
        wbop::design_operator(input, target, cfg.design, sink, g.threads);

    wbop::write_tensor(out, result.op.values());
    wbop::write_log_csv(log_path, result.log);
    if (!g.quiet)
        std::cerr << "designed operator: heldout " << result.initial_heldout_objective << " -> "
                  << result.final_heldout_objective << ", operator written to " << out << "\n";
    return 0;
}

int run_scf(const GlobalFlags &g, const std::string &manifold_path,
            const std::string &operator_path, const std::string &out)
{
    const wbop::ComplexMultiArray grid = wbop::read_tensor(manifold_path);
    const std::vector<double> angles = angles_from_sidecar(read_sidecar(manifold_path));

    wbop::ScfMap map;
    if (operator_path.empty())
    {
        map = wbop::scf_from_grid(grid, angles);
    }
    else
    {
        const wbop::ComplexMultiArray op = wbop::read_tensor(operator_path);
        map = wbop::effective_scf_from_grid(grid, op, angles);
    }
    wbop::write_map_csv(out, map);
    if (!g.quiet)
        std::cerr << "wrote " << angles.size() << "x" << angles.size()
                  << " correlation map to " << out << "\n";
    return 0;
}

int run_corr(const GlobalFlags &g, const std::string &manifold_path,
             const std::string &operator_path, double theta, double tau,
             std::optional<double> snr_db, const std::string &out)
{
    if (!std::isfinite(theta))
        throw wbop::config_error("--theta: must be finite");
    if (!(tau > 0.0) || !(tau <= 1.0))
        throw wbop::config_error("--tau: normalized delay must lie in (0, 1]");

    const wbop::ComplexMultiArray grid = wbop::read_tensor(manifold_path);
    const json sidecar = read_sidecar(manifold_path);
    const std::vector<double> angles = angles_from_sidecar(sidecar);
    const wbop::WidebandManifold manifold = manifold_from_sidecar(sidecar);

    // Unit-weight single source; optional additive noise at the requested
    // SNR, defined as total signal energy over total noise energy.
    wbop::ComplexMultiArray x =
        wbop::synthesize_channel(manifold, {{1.0, theta, tau}}, 0.0, 0);
    if (snr_db)
    {
        const double energy = wbop::frobenius_norm(x);
        const double sigma2 = energy * energy * std::pow(10.0, -*snr_db / 10.0) /
                              static_cast<double>(x.size());
        const wbop::ComplexMultiArray noise =
            wbop::synthesize_channel(manifold, {}, sigma2, g.seed.value_or(1));
        x = wbop::add(x, noise);
    }

    wbop::CorrMap map;
    if (operator_path.empty())
    {
        map = wbop::correlation_function_from_grid(x, grid, angles, tau);
    }
    else
    {
        const wbop::ComplexMultiArray op = wbop::read_tensor(operator_path);
        map = wbop::correlation_function_with_operator_from_grid(x, op, grid, angles, tau);
    }
    wbop::write_map_csv(out, map);
    if (!g.quiet)
        std::cerr << "wrote correlation curve over " << angles.size() << " angles to " << out
                  << "\n";
    return 0;
}

int run_psl(const GlobalFlags &g, const std::string &in, double halfwidth_deg)
{
    if (!(halfwidth_deg > 0.0))
        throw wbop::config_error("--halfwidth-deg: must be positive");
    const double halfwidth = halfwidth_deg * std::numbers::pi / 180.0;

    const auto map = wbop::read_map_csv(in);
    const double psl = std::holds_alternative<wbop::ScfMap>(map)
                           ? wbop::peak_sidelobe_level(std::get<wbop::ScfMap>(map), halfwidth)
                           : wbop::peak_sidelobe_level(std::get<wbop::CorrMap>(map), halfwidth);
    (void)g;
    std::cout << wbop::format_double(psl) << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"wideband array manifolds and correlation-shaping operator design"};
    app.require_subcommand(1);

    GlobalFlags g;
    std::uint64_t seed_value = 0;
    auto *seed_opt = app.add_option("--seed", seed_value, "Random seed (overrides the config)");
    app.add_option("--config", g.config_path, "Path to a key = value configuration file");
    app.add_option("--threads", g.threads, "Worker threads for grid evaluation")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", g.quiet, "Suppress progress output on standard error");

    auto *cmd_manifold =
        app.add_subcommand("manifold", "Evaluate a steering grid and write it with its sidecar");
    std::string manifold_out;
    std::size_t manifold_angles = 720;
    std::string manifold_band = "input";
    cmd_manifold->add_option("--out", manifold_out, "Output tensor path")->required();
    cmd_manifold->add_option("--angles", manifold_angles, "Number of grid angles over (-pi, pi]")
        ->check(CLI::PositiveNumber);
    cmd_manifold->add_option("--band", manifold_band, "Which configured band to evaluate")
        ->check(CLI::IsMember({"input", "target"}));
    cmd_manifold->fallthrough();

    auto *cmd_design =
        app.add_subcommand("design", "Design the shaping operator with mini-batch ADAM");
    std::string design_out;
    std::string design_log;
    cmd_design->add_option("--out", design_out, "Output operator tensor path")->required();
    cmd_design->add_option("--log", design_log, "Training log CSV path (default <out>.log.csv)");
    cmd_design->fallthrough();

    auto *cmd_scf = app.add_subcommand("scf", "Spatial correlation map of a steering grid");
    std::string scf_manifold;
    std::string scf_operator;
    std::string scf_out;
    cmd_scf->add_option("--manifold", scf_manifold, "Steering grid tensor (with sidecar)")
        ->required();
    cmd_scf->add_option("--operator", scf_operator, "Operator tensor to apply first");
    cmd_scf->add_option("--out", scf_out, "Output CSV path")->required();
    cmd_scf->fallthrough();

    auto *cmd_corr =
        app.add_subcommand("corr", "Angle-domain correlation curve of a synthetic snapshot");
    std::string corr_manifold;
    std::string corr_operator;
    std::string corr_out;
    double corr_theta = std::numbers::pi / 4.0;
    double corr_tau = 0.3;
    std::optional<double> corr_snr_db;
    cmd_corr->add_option("--manifold", corr_manifold, "Steering grid tensor (with sidecar)")
        ->required();
    cmd_corr->add_option("--operator", corr_operator, "Operator tensor to apply to both sides");
    cmd_corr->add_option("--theta", corr_theta, "Source azimuth in radians");
    cmd_corr->add_option("--tau", corr_tau, "Source normalized delay in (0, 1]");
    cmd_corr->add_option("--snr-db", corr_snr_db,
                         "Add noise at this SNR in dB (omit for a noiseless snapshot)");
    cmd_corr->add_option("--out", corr_out, "Output CSV path")->required();
    cmd_corr->fallthrough();

    auto *cmd_psl = app.add_subcommand("psl", "Peak side-lobe level of a stored map in dB");
    std::string psl_in;
    double psl_halfwidth_deg = 5.0;
    cmd_psl->add_option("--in", psl_in, "Map CSV produced by scf or corr")->required();
    cmd_psl->add_option("--halfwidth-deg", psl_halfwidth_deg,
                        "Main-lobe exclusion half-width in degrees");
    cmd_psl->fallthrough();

    try
    {
        app.parse(argc, argv);
        if (seed_opt->count() > 0)
            g.seed = seed_value;

        if (cmd_manifold->parsed())
            return run_manifold(g, manifold_out, manifold_angles, manifold_band);
        if (cmd_design->parsed())
            return run_design(g, design_out, design_log);
        if (cmd_scf->parsed())
            return run_scf(g, scf_manifold, scf_operator, scf_out);
        if (cmd_corr->parsed())
            return run_corr(g, corr_manifold, corr_operator, corr_theta, corr_tau, corr_snr_db,
                            corr_out);
        if (cmd_psl->parsed())
            return run_psl(g, psl_in, psl_halfwidth_deg);
        return 2;
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    catch (const wbop::config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const wbop::tensor_format_error &e)
    {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
    catch (const wbop::dimension_error &e)
    {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::domain_error &e)
    {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
    catch (const wbop::io_error &e)
    {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
