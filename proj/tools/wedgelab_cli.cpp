// Command-line front end: reproducible experiments over the library with
// plain CSV/JSON artifacts.
//
// Exit codes: 0 pass, 1 numerical failure, 2 usage error, 3 admissibility.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "wedgelab/io.hpp"
#include "wedgelab/suites.hpp"

using namespace wedgelab;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_numerical = 1;
constexpr int exit_usage = 2;
constexpr int exit_admissibility = 3;

std::string default_out() {
    const char* env = std::getenv("WEDGELAB_OUT");
    return env ? env : ".";
}

// key=value config overrides the command-line flags
void apply_config(const std::string& path,
                  const std::map<std::string, std::function<void(const std::string&)>>& setters) {
    if (path.empty()) return;
    for (const auto& [key, val] : io::read_kv_file(path)) {
        auto it = setters.find(key);
        if (it == setters.end()) throw validation_error("unknown config key: " + key);
        it->second(val);
    }
}

auto setter(double& target) {
    return [&target](const std::string& v) { target = std::stod(v); };
}
auto setter(int& target) {
    return [&target](const std::string& v) { target = std::stoi(v); };
}
auto setter(std::uint64_t& target) {
    return [&target](const std::string& v) { target = std::stoull(v); };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wedgelab: singular-exponent, wedge-integral and stability-budget lab"};
    app.require_subcommand(1);
    app.fallthrough();  // global --out/--seed/... may follow the subcommand

    std::string out_dir = default_out();
    std::string config_path;
    std::uint64_t seed = 12345;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--config", config_path, "key=value file overriding flags");
    app.add_option("--seed", seed, "seed for randomized suites");
    app.add_option("--threads", threads, "worker threads (1 = reference mode)");

    // ---- exponents ----
    auto* cmd_exp = app.add_subcommand("exponents", "edge/vertex singular exponents");
    double exp_k = 0.0, exp_a = 0.0;
    int exp_count = 2;
    std::string sphere_path, cone_name = "octant";
    cmd_exp->add_option("--k", exp_k, "conductivity contrast")->required();
    cmd_exp->add_option("--a", exp_a, "edge opening (radians)");
    cmd_exp->add_option("--count", exp_count, "number of edge exponents");
    cmd_exp->add_option("--sphere", sphere_path, "sphere mesh file (v/f format)");
    cmd_exp->add_option("--cone", cone_name, "cone for tagging: octant | quarter");

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand("verify", "run a verification suite");
    cmd_verify->set_help_flag("--help", "print help");  // frees --h for the wedge radius
    std::string suite_name;
    cmd_verify->add_option("suite", suite_name,
                           "identity | scaling | three-sphere | kernel | femcross")
        ->required();
    suites::wedge_params wp;
    std::string term_name = "IF2inf", wedge_cfg;
    int levels = 3, members = 200, degree = 6, points = 100000;
    cmd_verify->add_option("--k", wp.k, "contrast");
    cmd_verify->add_option("--a", wp.a, "edge opening");
    cmd_verify->add_option("--h", wp.h, "wedge radius");
    cmd_verify->add_option("--hz", wp.hz, "wedge height");
    cmd_verify->add_option("--rho", wp.rho, "vertex distance");
    cmd_verify->add_option("--ell", wp.ell, "cutoff radius");
    cmd_verify->add_option("--tau", wp.tau, "CGO parameter (0: 2*tau0)");
    cmd_verify->add_option("--term", term_name, "scaling term name");
    cmd_verify->add_option("--levels", levels, "femcross mesh levels");
    cmd_verify->add_option("--members", members, "three-sphere family size");
    cmd_verify->add_option("--degree", degree, "three-sphere max degree");
    cmd_verify->add_option("--points", points, "sphere lattice points");
    cmd_verify->add_option("--wedge", wedge_cfg, "wedge key=value config file");
    double window_lo = 1e-3, window_hi = 1e-1;
    cmd_verify->add_option("--window-lo", window_lo, "femcross fit window lower end");
    cmd_verify->add_option("--window-hi", window_hi, "femcross fit window upper end");

    // ---- budget ----
    auto* cmd_budget = app.add_subcommand("budget", "stability budget curve");
    budget::apriori_data ap;
    double eps_lo = 1e-300, eps_hi = 1e-10, eps_single = 0.0;
    int grid_n = 30;
    std::string apriori_path;
    cmd_budget->add_option("--eps", eps_single, "single eps (otherwise a grid)");
    cmd_budget->add_option("--eps-lo", eps_lo, "grid lower end");
    cmd_budget->add_option("--eps-hi", eps_hi, "grid upper end");
    cmd_budget->add_option("--n", grid_n, "grid size");
    cmd_budget->add_option("--apriori", apriori_path, "a-priori key=value file");
    cmd_budget->add_option("--k", ap.k, "contrast");
    cmd_budget->add_option("--a", ap.a, "edge opening");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*cmd_exp) {
            apply_config(config_path, {{"k", setter(exp_k)},
                                       {"a", setter(exp_a)},
                                       {"count", setter(exp_count)}});
            ordered_json rec;
            rec["k"] = exp_k;
            double s0 = 0.0;
            if (exp_a > 0.0 && exp_k > 1.0) {
                rec["a"] = exp_a;
                auto full = exponents::solve_edge_exponents_full(exp_k, exp_a, exp_count);
                rec["mu"] = full.mu;
                std::vector<double> resonant;
                for (const auto& r : full.all_roots)
                    if (r.log_resonance) resonant.push_back(r.mu);
                rec["log_resonant_roots"] = resonant;
                auto sc = exponents::choose_s(full.mu[0]);
                rec["s0"] = sc.s0;
                rec["s"] = sc.s;
                s0 = sc.s0;
            }
            if (!sphere_path.empty()) {
                auto cone = (cone_name == "quarter") ? exponents::vertex_cone::quarter_sphere()
                                                     : exponents::vertex_cone::octant();
                auto mesh = io::read_sphere_mesh(sphere_path, cone);
                double v1 = exponents::first_vertex_eigenvalue(mesh, exp_k);
                double lam = exponents::vertex_exponent(v1);
                rec["upsilon1"] = v1;
                rec["lambda1"] = lam;
                if (s0 > 0.0) rec["s0"] = std::min(s0, lam + 0.5);
            }
            if (!rec.contains("mu") && !rec.contains("upsilon1"))
                throw validation_error("exponents: need --a (with k > 1) or --sphere");
            std::string text = rec.dump(2) + "\n";
            std::cout << text;
            std::filesystem::create_directories(out_dir);
            std::ofstream(suites::join(out_dir, "exponents.json"), std::ios::binary) << text;
            return exit_pass;
        }

        if (*cmd_verify) {
            apply_config(config_path,
                         {{"k", setter(wp.k)}, {"a", setter(wp.a)}, {"h", setter(wp.h)},
                          {"hz", setter(wp.hz)}, {"rho", setter(wp.rho)},
                          {"ell", setter(wp.ell)}, {"tau", setter(wp.tau)},
                          {"levels", setter(levels)}, {"members", setter(members)},
                          {"points", setter(points)}, {"seed", setter(seed)},
                          {"threads", setter(threads)}});
            if (!wedge_cfg.empty()) wp.apply_kv(io::read_kv_file(wedge_cfg));

            suites::suite_result res;
            if (suite_name == "identity") {
                res = suites::run_identity(wp, out_dir);
            } else if (suite_name == "scaling") {
                res = suites::run_scaling(wp, term_name, out_dir);
            } else if (suite_name == "three-sphere") {
                res = suites::run_three_sphere(seed, members, degree, points, threads, out_dir);
            } else if (suite_name == "kernel") {
                res = suites::run_kernel(out_dir);
            } else if (suite_name == "femcross") {
                res = suites::run_femcross(wp.k, wp.a, levels, out_dir, window_lo, window_hi);
            } else {
                std::cerr << "unknown suite: " << suite_name << "\n";
                return exit_usage;
            }
            std::cout << res.summary;
            return res.pass ? exit_pass : exit_numerical;
        }

        if (*cmd_budget) {
            apply_config(config_path,
                         {{"k", setter(ap.k)}, {"a", setter(ap.a)}, {"eps", setter(eps_single)},
                          {"eps_lo", setter(eps_lo)}, {"eps_hi", setter(eps_hi)},
                          {"n", setter(grid_n)}});
            if (!apriori_path.empty()) {
                for (const auto& [key, val] : io::read_kv_file(apriori_path)) {
                    double x = std::stod(val);
                    if (key == "k") ap.k = x;
                    else if (key == "a") ap.a = x;
                    else if (key == "ell") ap.ell = x;
                    else if (key == "delta0") ap.delta0 = x;
                    else if (key == "l0") ap.l0 = x;
                    else if (key == "a_inf") ap.a_inf = x;
                    else if (key == "lambda1") ap.lambda1 = x;
                    else if (key == "alpha_tilde") ap.alpha_tilde = x;
                    else if (key == "alpha") ap.alpha = x;
                    else if (key == "T") ap.T = x;
                    else if (key == "L") ap.L = x;
                    else if (key == "C") ap.C = x;
                    else if (key == "eps_m") ap.eps_m = x;
                    else throw validation_error("unknown a-priori key: " + key);
                }
            }
            if (eps_single > 0.0) {
                eps_lo = eps_single;
                eps_hi = eps_single;
                grid_n = 1;
            }
            auto res = suites::run_budget_curve(ap, eps_lo, eps_hi, grid_n, out_dir);
            auto b = budget::compute_budget(eps_lo, ap);
            ordered_json rec;
            rec["kappa"] = b.kappa;
            rec["mu1"] = b.mu1;
            rec["mu2"] = b.mu2;
            rec["s"] = b.s;
            rec["lambda1"] = ap.lambda1;
            rec["lambda_range_ok"] = b.lambda_range_ok;
            rec["eps_star"] = budget::eps_star(ap);
            std::string text = rec.dump(2) + "\n";
            std::cout << res.summary << text;
            std::ofstream(suites::join(out_dir, "budget.json"), std::ios::binary) << text;
            return res.pass ? exit_pass : exit_numerical;
        }
    } catch (const admissibility_error& e) {
        std::cerr << "admissibility error: " << e.what() << "\n";
        return exit_admissibility;
    } catch (const validation_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_usage;
    } catch (const error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_usage;
}
