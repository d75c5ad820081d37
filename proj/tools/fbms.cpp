// Command-line front end: builds stacking surfaces, dumps reports, and runs
// the verification matrix.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "fbms/acceptance.hpp"
#include "fbms/balance.hpp"
#include "fbms/geometry.hpp"
#include "fbms/index.hpp"
#include "fbms/mesh_audit.hpp"
#include "fbms/mesh_io.hpp"
#include "fbms/spectra.hpp"
#include "fbms/surface.hpp"
#include "fbms/symgroup.hpp"
#include "fbms/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace fbms;

namespace {

struct RunConfig {
    int N = 2;
    int m = 10;
    std::vector<double> zeta, xi;
    double resolution = 0.02;
    double grid_h = 1.0 / 32;
    unsigned seed = 0;
    std::string out_dir = ".";
    int N_max = 8, m_max = 12;
    std::vector<std::string> only;
};

// criterion ids named by the module they exercise
std::set<int> criteria_of(const std::vector<std::string>& keys) {
    std::set<int> ids;
    for (const auto& k : keys) {
        if (k == "topology") ids.insert(1);
        else if (k == "balance") ids.insert(2);
        else if (k == "geometry") ids.insert({3, 4, 5});
        else if (k == "spectra") ids.insert({6, 7, 10});
        else if (k == "index") ids.insert(8);
        else if (k == "surface") ids.insert(9);
        else {
            const int id = std::atoi(k.c_str());
            if (id < 1 || id > 10)
                throw std::invalid_argument("--only expects a module name or an id in 1..10, got '" +
                                            k + "'");
            ids.insert(id);
        }
    }
    return ids;
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    ordered_json j;
    is >> j;
    if (j.contains("N")) cfg.N = j["N"];
    if (j.contains("m")) cfg.m = j["m"];
    if (j.contains("zeta")) cfg.zeta = j["zeta"].get<std::vector<double>>();
    if (j.contains("xi")) cfg.xi = j["xi"].get<std::vector<double>>();
    if (j.contains("resolution")) cfg.resolution = j["resolution"];
    if (j.contains("grid_h")) cfg.grid_h = j["grid_h"];
    if (j.contains("seed")) cfg.seed = j["seed"];
    if (j.contains("out")) cfg.out_dir = j["out"];
    if (j.contains("N_max")) cfg.N_max = j["N_max"];
    if (j.contains("m_max")) cfg.m_max = j["m_max"];
}

balance::StackingParams params_of(const RunConfig& cfg) {
    Eigen::VectorXd zeta, xi;
    if (!cfg.zeta.empty())
        zeta = Eigen::Map<const Eigen::VectorXd>(cfg.zeta.data(), cfg.zeta.size());
    if (!cfg.xi.empty()) xi = Eigen::Map<const Eigen::VectorXd>(cfg.xi.data(), cfg.xi.size());
    return balance::StackingParams::make(cfg.N, cfg.m, zeta, xi);
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(1) << "\n";
    std::cout << "wrote " << path << "\n";
}

int cmd_topology(const RunConfig& cfg) {
    ordered_json rows = ordered_json::array();
    bool all_ok = true;
    for (int N = 1; N <= cfg.N_max; ++N)
        for (int m = 3; m <= cfg.m_max; ++m) {
            const auto t = topo::stacking_topology(N, m);
            const int chi = topo::euler_characteristic(topo::build_combinatorial_stacking(N, m));
            const bool ok = chi == t.euler_char && chi == m - (m - 1) * N &&
                            8 * t.genus + 4 * t.boundary_components - 8 ==
                                4 * (m - 1) * N - 4 * m;
            all_ok &= ok;
            rows.push_back({{"N", N},
                            {"m", m},
                            {"genus", t.genus},
                            {"boundary", t.boundary_components},
                            {"chi", chi},
                            {"ok", ok}});
            if (!ok) std::cerr << "identity failure at N=" << N << " m=" << m << "\n";
        }
    ordered_json j;
    j["command"] = "topology";
    j["all_ok"] = all_ok;
    j["rows"] = rows;
    write_json(j, (fs::path(cfg.out_dir) / "topology.json").string());
    return all_ok ? 0 : 1;
}

int cmd_balance(const RunConfig& cfg) {
    const auto d = balance::derived_parameters(params_of(cfg));
    const auto f = balance::predicted_forces(d);
    auto vec = [](const Eigen::VectorXd& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    ordered_json j;
    j["command"] = "balance";
    j["N"] = d.N;
    j["m"] = d.m;
    j["lambda"] = d.lambda;
    j["x"] = vec(d.x);
    j["taubar"] = vec(d.taubar);
    j["tau"] = vec(d.tau);
    j["a"] = vec(d.a);
    j["delta_hK"] = vec(d.delta_hK);
    j["disloc"] = vec(d.disloc);
    j["hK"] = vec(d.hK);
    j["hB"] = vec(d.hB);
    j["F_predicted"] = vec(f.F);
    j["Ftilde"] = vec(f.Ftilde);
    j["matching_residual"] = d.matching_residual();
    write_json(j, (fs::path(cfg.out_dir) / "balance.json").string());
    return 0;
}

int cmd_surface(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    const auto d = balance::derived_parameters(p);
    const auto mesh = surf::assemble_surface(p, cfg.resolution);
    const fs::path dir(cfg.out_dir);
    surf::export_obj(mesh, (dir / "surface.obj").string());
    surf::export_labels(mesh, (dir / "surface_labels.json").string());
    for (int i = 1; i <= d.N; ++i)
        surf::export_patch_csv(i, d, 80, 40,
                               (dir / ("patch_layer" + std::to_string(i) + ".csv")).string());
    std::cout << "wrote " << (dir / "surface.obj").string() << " and sidecar labels\n";

    const double orth = surf::boundary_orthogonality_audit(mesh, d);
    const auto grp = sym::standard_group(
        cfg.N % 2 == 0 ? sym::GroupKind::prismatic : sym::GroupKind::antiprismatic, cfg.m);
    const double closure = surf::symmetry_closure_audit(mesh, grp);
    const long hits = surf::self_intersection_count(mesh);
    std::cout << "vertices " << mesh.vertices.size() << ", faces " << mesh.faces.size() << "\n"
              << "boundary conormal max angle " << orth << " rad\n"
              << "group orbit closure " << closure << "\n"
              << "self-intersections " << hits << "\n";
    return (orth < 1e-3 && closure < 1e-9 && hits == 0) ? 0 : 1;
}

int cmd_geometry(const RunConfig& cfg) {
    const auto p = params_of(cfg);
    const auto d = balance::derived_parameters(p);
    const auto mesh = surf::assemble_surface(p, cfg.resolution);
    const auto rep = geom::mean_curvature_field(mesh, d);
    std::vector<double> normA2(mesh.vertices.size(), 0.0);
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const auto& v = mesh.vertices[k];
        if (v.region == surf::Region::Catenoid)
            normA2[k] = geom::forms_catenoid(v.catenoid, v.t, v.vartheta, d).normA2;
        else if (v.region != surf::Region::FlatDisc)
            normA2[k] = geom::forms_disc_graph(v.layer, v.sigma, v.theta, d).normA2;
    }
    surf::export_field_csv(mesh, rep.H, normA2,
                           (fs::path(cfg.out_dir) / "geometry_fields.csv").string());
    const Eigen::VectorXd F = geom::vertical_forces(mesh);
    const auto pred = balance::predicted_forces(d);
    ordered_json j;
    j["command"] = "geometry";
    j["sup_catenoid_rho1H"] = rep.sup_cat_rho1H;
    j["sup_disc_weighted"] = rep.sup_disc_weighted;
    j["sup_disc_residual"] = rep.sup_disc_residual;
    j["F_mesh"] = std::vector<double>(F.data(), F.data() + F.size());
    j["F_predicted"] = std::vector<double>(pred.F.data(), pred.F.data() + pred.F.size());
    write_json(j, (fs::path(cfg.out_dir) / "geometry.json").string());
    return 0;
}

int cmd_spectra(const RunConfig& cfg) {
    std::ofstream csv((fs::path(cfg.out_dir) / "spectra.csv").string());
    csv << "model,parameter,class,k,eigenvalue,h\n";
    csv.precision(17);

    ordered_json counts = ordered_json::array();
    for (double T : {3.0, 6.0, 12.0}) {
        const auto roots = spectra::catenoid_closed_form(T, spectra::Family::DirichletTEven);
        for (std::size_t k = 0; k < roots.size(); ++k)
            csv << "catenoid_dirichlet_closed," << T << ",t-even," << k + 1 << ","
                << roots[k].lambda << ",0\n";
    }
    {
        spectra::SpectralProblem p;
        p.domain.kind = spectra::DomainKind::CatenoidRect;
        p.domain.T = 3.0;
        p.domain.h = cfg.grid_h;
        p.catenoid_potential = true;
        p.bc_x0 = p.bc_x1 = spectra::BC::Dirichlet;
        const auto s = spectra::fd_eigensolve(p, 4);
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
            csv << "catenoid_dirichlet_fd,3,none," << k + 1 << "," << s.eigenvalues[k] << ","
                << s.h << "\n";
        const auto c6 = spectra::catenoid_neumann_low_counts(6.0);
        counts.push_back({{"model", "catenoid_neumann"},
                          {"parameter", 6.0},
                          {"negative", c6.n_negative},
                          {"zero", c6.n_zero}});
    }
    for (double r : {0.3, 0.1}) {
        spectra::SpectralProblem p;
        p.domain.kind = spectra::DomainKind::PerforatedTwo;
        p.domain.r = r;
        p.domain.h = r / 8.0;
        const auto rep = spectra::model_low_spectrum_counts(p, 4);
        const auto s = spectra::fd_eigensolve(p, 4);
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
            csv << "perforated_two," << r << ",none," << k + 1 << "," << s.eigenvalues[k] << ","
                << s.h << "\n";
        counts.push_back({{"model", "perforated_two"},
                          {"parameter", r},
                          {"negative", rep.n_negative},
                          {"zero", rep.n_zero},
                          {"lambda2", rep.lambda2}});
    }
    ordered_json j;
    j["command"] = "spectra";
    j["counts"] = counts;
    write_json(j, (fs::path(cfg.out_dir) / "spectra.json").string());
    std::cout << "wrote spectra.csv\n";
    return 0;
}

int cmd_index(const RunConfig& cfg) {
    ordered_json rows = ordered_json::array();
    std::ofstream csv((fs::path(cfg.out_dir) / "index_bounds.csv").string());
    csv << "N,m,lower,upper,equiv_lower,equiv_upper\n";
    for (int N = 2; N <= cfg.N_max; ++N)
        for (int m = 3; m <= cfg.m_max; ++m) {
            const auto b = index::theorem_bounds(N, m);
            rows.push_back({{"N", N},
                            {"m", m},
                            {"lower", b.lower},
                            {"upper_ind_plus_nul", b.upper_ind_plus_nul},
                            {"equiv_lower", b.equiv_lower},
                            {"equiv_upper", b.equiv_upper},
                            {"identities", index::topological_translation(N, m).identities_hold}});
            csv << N << "," << m << "," << b.lower << "," << b.upper_ind_plus_nul << ","
                << b.equiv_lower << "," << b.equiv_upper << "\n";
        }
    ordered_json j;
    j["command"] = "index";
    j["rows"] = rows;
    write_json(j, (fs::path(cfg.out_dir) / "index_bounds.json").string());
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const auto results = accept::run_all(cfg.seed, criteria_of(cfg.only));
    ordered_json arr = ordered_json::array();
    int failures = 0;
    for (const auto& r : results) {
        std::printf("[%s] criterion %2d: %-34s (%.1fs) %s\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        arr.push_back({{"id", r.id},
                       {"name", r.name},
                       {"passed", r.passed},
                       {"detail", r.detail}});
        if (!r.passed) ++failures;
    }
    ordered_json j;
    j["command"] = "verify";
    j["seed"] = cfg.seed;
    j["failures"] = failures;
    j["criteria"] = arr;
    write_json(j, (fs::path(cfg.out_dir) / "verify.json").string());
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free boundary minimal disc stackings: construction and verification"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file, overridden by flags");
        sub->add_option("--N", cfg.N, "number of layers");
        sub->add_option("--m", cfg.m, "rotational order");
        sub->add_option("--zeta", cfg.zeta, "waist-size parameters (length N-1)");
        sub->add_option("--xi", cfg.xi, "waist-height parameters (length N-1)");
        sub->add_option("--resolution", cfg.resolution, "target mesh edge length");
        sub->add_option("--grid-h", cfg.grid_h, "finite-difference grid spacing");
        sub->add_option("--seed", cfg.seed, "seed for randomized probes");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--N-max", cfg.N_max, "grid upper bound for N");
        sub->add_option("--m-max", cfg.m_max, "grid upper bound for m");
    };

    auto* topo_cmd = app.add_subcommand("topology", "combinatorial invariants over a grid");
    auto* bal_cmd = app.add_subcommand("balance", "parameter chain and predicted forces");
    auto* surf_cmd = app.add_subcommand("surface", "assemble a mesh, export OBJ, run audits");
    auto* geo_cmd = app.add_subcommand("geometry", "curvature fields and force integrals");
    auto* spec_cmd = app.add_subcommand("spectra", "model eigenvalue tables and counts");
    auto* idx_cmd = app.add_subcommand("index", "index/nullity bound tables");
    auto* ver_cmd = app.add_subcommand("verify", "run the acceptance matrix");
    ver_cmd->add_option("--only", cfg.only, "restrict to criterion ids or module names");
    for (auto* sub : {topo_cmd, bal_cmd, surf_cmd, geo_cmd, spec_cmd, idx_cmd, ver_cmd})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            // file first, then reparse so command-line flags win
            load_config_file(config_path, cfg);
            app.clear();
            CLI11_PARSE(app, argc, argv);
        }

        fs::create_directories(cfg.out_dir);
        if (topo_cmd->parsed()) return cmd_topology(cfg);
        if (bal_cmd->parsed()) return cmd_balance(cfg);
        if (surf_cmd->parsed()) return cmd_surface(cfg);
        if (geo_cmd->parsed()) return cmd_geometry(cfg);
        if (spec_cmd->parsed()) return cmd_spectra(cfg);
        if (idx_cmd->parsed()) return cmd_index(cfg);
        if (ver_cmd->parsed()) return cmd_verify(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
