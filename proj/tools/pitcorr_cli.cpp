// pitcorr command-line front end.

#include "pitcorr/io/bounds.hpp"
#include "pitcorr/io/scenario.hpp"
#include "pitcorr/pitcorr.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

namespace {

using namespace pitcorr;
namespace io = pitcorr::io;

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kInstability = 3, kNonConvergence = 4 };

io::ScenarioConfig load(const std::string& src, double scale) {
    return io::apply_horizon_scale(io::load_scenario(src), scale);
}

void print_summary(const io::ScenarioConfig& c, const io::RunArtifacts& a) {
    std::printf("%s: %ld steps in %.3f s (%.3f ms/step), w = %.4g\n", c.name.c_str(), a.timing.steps,
                a.timing.wall_seconds, a.timing.mean_step_ms, a.w);
    if (a.front_fit)
        std::printf("front: depth^2 = %.4g t + %.4g, R^2 = %.5f\n", a.front_fit->slope, a.front_fit->intercept,
                    a.front_fit->r2);
    if (!a.iterations.empty()) {
        double kp = 0, kc = 0;
        for (const auto& r : a.iterations) {
            kp += r.k_phi;
            kc += r.k_c;
        }
        const auto& last = a.iterations.back();
        std::printf("iterations: mean k_phi %.2f, mean k_c %.2f; max|phi|,|c| on holes %.3e, %.3e\n",
                    kp / double(a.iterations.size()), kc / double(a.iterations.size()), last.max_phi_theta,
                    last.max_c_theta);
    }
    for (const auto& e : a.errors) std::printf("t = %-8g Err_phi = %.3e  Err_c = %.3e\n", e.t, e.err_phi, e.err_c);
    if (!a.output_dir.empty()) std::printf("outputs in %s\n", a.output_dir.string().c_str());
}

BoundaryKind parse_bc(const std::string& s) {
    if (s == "neumann") return BoundaryKind::Neumann;
    if (s == "dirichlet") return BoundaryKind::Dirichlet;
    throw ConfigError("--bc: expected neumann or dirichlet");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-field pitting corrosion solver"};
    app.require_subcommand(1);
    double scale = 1.0;
    std::string out_root;
    app.add_option("--horizon-scale", scale, "Shrink the horizon by this factor (extents by its square root)")
        ->check(CLI::Range(1e-6, 1.0));
    app.add_option("--output-root", out_root, "Output root (default: $PITCORR_OUTPUT_ROOT or ./pitcorr-out)");

    std::string run_src;
    bool no_ref = false;
    auto* run = app.add_subcommand("run", "Run a builtin scenario or a JSON scenario file");
    run->add_option("config", run_src, "Scenario name or path")->required();
    run->add_flag("--no-reference", no_ref, "Skip the error table even if a reference block exists");

    std::string ref_src;
    auto* ref = app.add_subcommand("reference", "Generate and store reference snapshots for a scenario");
    ref->add_option("config", ref_src, "Scenario name or path")->required();

    std::string sweep_src;
    std::vector<double> sweep_dt, sweep_h;
    auto* sweep = app.add_subcommand("sweep", "Wall-time scaling sweep over dt or h multipliers");
    sweep->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    sweep->add_option("config", sweep_src, "Scenario name or path")->required();
    auto* odt = sweep->add_option("--dt", sweep_dt, "dt multipliers");
    auto* oh = sweep->add_option("--h", sweep_h, "spacing multipliers");
    odt->excludes(oh);

    std::string variant = "imex_e", order = "euler", bc = "neumann", eq = "c", geometry = "circle";
    std::vector<double> b_dt{1e-5}, b_h{1.0};
    double b_w = 4.43e8;
    bool actual = false, open_pit = false;
    auto* bounds = app.add_subcommand("bounds", "Closed-form iteration-matrix bounds (optionally actual radii)");
    bounds->set_help_flag("--help", "Print this help message and exit");
    bounds->add_option("--variant", variant)->check(CLI::IsMember({"imex_i", "imex_e"}));
    bounds->add_option("--order", order)->check(CLI::IsMember({"euler", "2sbdf"}));
    bounds->add_option("--bc", bc)->check(CLI::IsMember({"neumann", "dirichlet"}));
    bounds->add_option("--equation", eq)->check(CLI::IsMember({"phi", "c"}));
    bounds->add_option("--geometry", geometry)->check(CLI::IsMember({"generic", "circle"}));
    bounds->add_option("--dt", b_dt, "time steps [s]");
    bounds->add_option("--h", b_h, "grid spacings [um]");
    bounds->add_option("--w", b_w, "relaxation parameter");
    bounds->add_flag("--actual", actual, "Also compute the actual radius on a 200x100 um plate with a 4 um pit");
    bounds->add_flag("--open-pit", open_pit, "Exclude nodes on the pit circle from the hole");

    bool dump = false;
    auto* list = app.add_subcommand("list-scenarios", "List builtin scenarios");
    list->add_flag("--dump", dump, "Print the JSON of every builtin");

    CLI11_PARSE(app, argc, argv);

    io::RunOptions opts;
    if (!out_root.empty()) opts.output_root = out_root;
    try {
        if (*run) {
            const auto c = load(run_src, scale);
            opts.with_reference = !no_ref;
            print_summary(c, io::run_scenario(c, opts));
        } else if (*ref) {
            const auto c = load(ref_src, scale);
            const auto snaps = io::generate_reference(c, opts);
            std::printf("%s: %zu reference snapshots written under %s\n", c.name.c_str(), snaps.size(),
                        (io::output_root(opts) / c.outputs.directory / "reference").string().c_str());
        } else if (*sweep) {
            const auto c = load(sweep_src, scale);
            if (sweep_dt.empty() && sweep_h.empty()) throw ConfigError("sweep: give --dt or --h multipliers");
            const bool by_dt = !sweep_dt.empty();
            const auto rep = io::scaling_report(c, by_dt ? io::ScalingKind::TimeStep : io::ScalingKind::Spacing,
                                                by_dt ? sweep_dt : sweep_h);
            std::printf("%s,wall_seconds,steps,unknowns\n", by_dt ? "dt" : "h");
            for (const auto& p : rep.points)
                std::printf("%.6g,%.6f,%ld,%zu\n", p.parameter, p.wall_seconds, p.steps, p.unknowns);
            std::printf("# log-log slope %.4f\n", rep.slope);
        } else if (*bounds) {
            std::printf("variant,bc,equation,dt,h,gamma,bound,actual,admissible\n");
            for (double h : b_h)
                for (double dt : b_dt) {
                    BoundQuery q;
                    q.variant = variant == "imex_i" ? IterVariant::ImexI : IterVariant::ImexE;
                    q.order = order == "euler" ? SchemeOrder::Euler : SchemeOrder::TwoSBDF;
                    q.bc_outer = parse_bc(bc);
                    q.equation = eq == "phi" ? Equation::Phi : Equation::C;
                    q.geometry = geometry == "circle" ? GeometryClass::Circle : GeometryClass::Generic;
                    q.spacings = {h * 1e-6, h * 1e-6};
                    q.dt = dt;
                    q.w = b_w;
                    io::PitGeometry geo;
                    geo.membership = open_pit ? Membership::Open : Membership::Closed;
                    const auto p = io::evaluate_bounds(q, actual, geo);
                    std::printf("%s,%s,%s,%.6g,%.6g,%.3g,%.6e,%s,%d\n", variant.c_str(), bc.c_str(), eq.c_str(), dt, h,
                                gamma_of(q.order), p.bound.value,
                                p.actual ? io::format_double(p.actual->value).c_str() : "",
                                int(p.bound.admissible));
                }
        } else if (*list) {
            for (const auto& [name, text] : io::builtin_scenarios) {
                if (dump) {
                    std::printf("%s\n", text.data());
                } else {
                    const auto c = io::load_scenario(std::string(name));
                    std::printf("%-16s %s\n", std::string(name).c_str(), c.description.c_str());
                }
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InstabilityError& e) {
        std::cerr << "solver instability: " << e.what() << '\n';
        return kInstability;
    } catch (const NonConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return kNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOk;
}
