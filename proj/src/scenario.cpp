#include "pitcorr/io/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace pitcorr::io {

namespace detail {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::vector<double> num_list(const json& j, const std::string& path, std::size_t n = 0) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    if (n && j.size() != n) fail(path, "expected " + std::to_string(n) + " entries");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

int axis_index(const json& j, const std::string& path) {
    if (j.is_number_integer()) {
        const int a = j.get<int>();
        if (a < 0 || a > 2) fail(path, "axis index out of range");
        return a;
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "x") return 0;
        if (s == "y") return 1;
        if (s == "z") return 2;
    }
    fail(path, "expected x, y or z");
}

EndCondition end_condition(const json& j, const std::string& path) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "neumann") return EndCondition::neumann();
        if (s == "dirichlet") return EndCondition::dirichlet(0.0);
        fail(path, "unknown boundary kind '" + s + "'");
    }
    if (j.is_object() && j.contains("dirichlet")) return EndCondition::dirichlet(num(j["dirichlet"], path + ".dirichlet"));
    fail(path, "expected \"neumann\", \"dirichlet\" or {\"dirichlet\": value}");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) fail(path + "." + it.key(), "unknown key");
    }
}

Membership membership(const json& s, const std::string& path) {
    const std::string m = s.value("membership", "closed");
    if (m == "closed") return Membership::Closed;
    if (m == "open") return Membership::Open;
    fail(path + ".membership", "expected open or closed");
}

} // namespace detail

ScenarioConfig parse_scenario(const json& j) {
    using detail::fail;
    using detail::num;
    if (!j.is_object()) fail("<root>", "scenario must be a JSON object");
    detail::check_keys(j, "<root>", {"name", "description", "grid", "geometry", "initial", "scheme", "horizon",
                                     "snapshot_times", "outputs", "reference", "parameters"});
    ScenarioConfig c;
    c.source = j;
    c.name = j.value("name", "scenario");
    c.description = j.value("description", "");

    if (!j.contains("grid")) fail("grid", "missing");
    const json& g = j["grid"];
    detail::check_keys(g, "grid", {"extents_um", "spacing_um", "spacings_um", "bc"});
    if (!g.contains("extents_um")) fail("grid.extents_um", "missing");
    auto ext = detail::num_list(g["extents_um"], "grid.extents_um");
    if (ext.size() < 2 || ext.size() > 3) fail("grid.extents_um", "need 2 or 3 extents");
    for (double& e : ext) {
        if (!(e > 0)) fail("grid.extents_um", "extents must be positive");
        e *= kMicron;
    }
    c.extents = ext;
    if (g.contains("spacings_um")) {
        c.spacings = detail::num_list(g["spacings_um"], "grid.spacings_um", ext.size());
    } else if (g.contains("spacing_um")) {
        c.spacings.assign(ext.size(), num(g["spacing_um"], "grid.spacing_um"));
    } else {
        fail("grid.spacing_um", "missing");
    }
    for (double& h : c.spacings) {
        if (!(h > 0)) fail("grid.spacing_um", "spacing must be positive");
        h *= kMicron;
    }
    const char* names[3] = {"x", "y", "z"};
    if (!g.contains("bc") || !g["bc"].is_object()) fail("grid.bc", "missing");
    for (std::size_t r = 0; r < ext.size(); ++r) {
        const std::string p = std::string("grid.bc.") + names[r];
        if (!g["bc"].contains(names[r])) fail(p, "missing");
        const json& a = g["bc"][names[r]];
        if (!a.contains("low") || !a.contains("high")) fail(p, "needs low and high");
        c.bc.push_back({detail::end_condition(a["low"], p + ".low"), detail::end_condition(a["high"], p + ".high")});
    }

    if (j.contains("geometry")) {
        const json& geo = j["geometry"];
        if (!geo.is_array()) fail("geometry", "expected an array");
        for (std::size_t i = 0; i < geo.size(); ++i) {
            const std::string p = "geometry[" + std::to_string(i) + "]";
            const json& s = geo[i];
            const std::string type = s.value("type", "");
            bool snap = false;
            if (type == "circle") {
                detail::check_keys(s, p, {"type", "center_um", "radius_um", "snap_to_node", "membership"});
                Circle cc;
                cc.center = detail::num_list(s.at("center_um"), p + ".center_um", ext.size());
                for (double& x : cc.center) x *= kMicron;
                cc.radius = num(s.at("radius_um"), p + ".radius_um") * kMicron;
                if (!(cc.radius > 0)) fail(p + ".radius_um", "must be positive");
                snap = s.value("snap_to_node", false);
                cc.membership = detail::membership(s, p);
                c.shapes.emplace_back(cc);
            } else if (type == "cylinder_segment") {
                detail::check_keys(s, p, {"type", "p0_um", "p1_um", "radius_um", "membership"});
                CylinderSegment cy;
                const auto a = detail::num_list(s.at("p0_um"), p + ".p0_um", ext.size());
                const auto b = detail::num_list(s.at("p1_um"), p + ".p1_um", ext.size());
                for (std::size_t r = 0; r < ext.size(); ++r) {
                    cy.p0[r] = a[r] * kMicron;
                    cy.p1[r] = b[r] * kMicron;
                }
                cy.radius = num(s.at("radius_um"), p + ".radius_um") * kMicron;
                if (!(cy.radius > 0)) fail(p + ".radius_um", "must be positive");
                cy.membership = detail::membership(s, p);
                c.shapes.emplace_back(cy);
            } else if (type == "rough_edge_profile") {
                detail::check_keys(s, p, {"type", "along_axis", "height_axis", "base_um", "amplitude_um",
                                          "wavelength_um", "seed", "membership"});
                RoughEdgeProfile rp;
                rp.along_axis = detail::axis_index(s.value("along_axis", json("x")), p + ".along_axis");
                rp.height_axis = detail::axis_index(s.value("height_axis", json("y")), p + ".height_axis");
                rp.base = num(s.at("base_um"), p + ".base_um") * kMicron;
                rp.amplitude = num(s.at("amplitude_um"), p + ".amplitude_um") * kMicron;
                rp.wavelength = num(s.at("wavelength_um"), p + ".wavelength_um") * kMicron;
                rp.seed = s.value("seed", std::uint64_t{0});
                rp.membership = detail::membership(s, p);
                if (!(rp.wavelength > 0) || rp.amplitude < 0) fail(p, "wavelength must be positive, amplitude >= 0");
                c.shapes.emplace_back(rp);
            } else {
                fail(p + ".type", "unknown shape '" + type + "'");
            }
            c.snap_to_node.push_back(snap);
        }
    }

    if (j.contains("initial")) {
        detail::check_keys(j["initial"], "initial", {"phi", "c"});
        c.phi0 = num(j["initial"].value("phi", json(1.0)), "initial.phi");
        c.c0 = num(j["initial"].value("c", json(1.0)), "initial.c");
    }

    if (j.contains("parameters")) {
        const json& pj = j["parameters"];
        detail::check_keys(pj, "parameters", {"L", "A", "D_phi", "D_c", "c_L", "omega"});
        auto get = [&](const char* k, double& dst) {
            if (pj.contains(k)) dst = num(pj[k], std::string("parameters.") + k);
        };
        get("L", c.params.L);
        get("A", c.params.A);
        get("D_phi", c.params.D_phi);
        get("D_c", c.params.D_c);
        get("c_L", c.params.c_L);
        get("omega", c.params.omega);
        try {
            c.params.validate();
        } catch (const std::invalid_argument& e) {
            fail("parameters", e.what());
        }
    }

    if (!j.contains("scheme")) fail("scheme", "missing");
    const json& s = j["scheme"];
    detail::check_keys(s, "scheme", {"order", "dt", "w", "relaxation", "safety_factor", "variant", "eps", "stop_mode",
                                     "max_iters"});
    const std::string order = s.value("order", "euler");
    if (order == "euler") c.scheme.order = SchemeOrder::Euler;
    else if (order == "2sbdf") c.scheme.order = SchemeOrder::TwoSBDF;
    else fail("scheme.order", "expected euler or 2sbdf");
    if (!s.contains("dt")) fail("scheme.dt", "missing");
    c.scheme.dt = num(s["dt"], "scheme.dt");
    if (!(c.scheme.dt > 0)) fail("scheme.dt", "must be positive");
    const std::string relax = s.value("relaxation", s.contains("w") ? "fixed" : "default");
    if (relax == "fixed") {
        c.scheme.w = num(s.at("w"), "scheme.w");
        if (!(c.scheme.w >= 0)) fail("scheme.w", "must be non-negative");
    } else if (relax == "jacobian") {
        c.w_auto = true;
    } else if (relax == "default") {
        c.w_auto = !c.params.is_default();
        c.scheme.w = RelaxationPolicy{}.fixed_w;
    } else {
        fail("scheme.relaxation", "expected fixed, jacobian or default");
    }
    c.safety_factor = num(s.value("safety_factor", json(1.1)), "scheme.safety_factor");
    if (!(c.safety_factor >= 1)) fail("scheme.safety_factor", "must be >= 1");
    const std::string variant = s.value("variant", "imex_e");
    if (variant == "imex_e") c.scheme.variant = IterVariant::ImexE;
    else if (variant == "imex_i") c.scheme.variant = IterVariant::ImexI;
    else fail("scheme.variant", "expected imex_i or imex_e");
    if (s.contains("eps")) {
        const auto e = detail::num_list(s["eps"], "scheme.eps", 3);
        c.scheme.eps1 = e[0];
        c.scheme.eps2 = e[1];
        c.scheme.eps3 = e[2];
        if (!(e[0] > 0 && e[1] > 0 && e[2] > 0)) fail("scheme.eps", "tolerances must be positive");
    }
    const std::string stop = s.value("stop_mode", "full");
    if (stop == "full") c.scheme.stop_mode = StopMode::FullCriteria;
    else if (stop == "reduced") c.scheme.stop_mode = StopMode::ReducedSingleIteration;
    else fail("scheme.stop_mode", "expected full or reduced");
    c.scheme.max_iters = s.value("max_iters", 500);
    if (c.scheme.max_iters < 1) fail("scheme.max_iters", "must be >= 1");

    if (!j.contains("horizon")) fail("horizon", "missing");
    c.horizon = num(j["horizon"], "horizon");
    if (!(c.horizon >= 0)) fail("horizon", "must be non-negative");
    try {
        (void)horizon_steps(c.horizon, c.scheme.dt);
    } catch (const std::invalid_argument& e) {
        fail("horizon", e.what());
    }
    if (j.contains("snapshot_times")) c.snapshot_times = detail::num_list(j["snapshot_times"], "snapshot_times");
    for (double t : c.snapshot_times)
        if (t < 0 || t > c.horizon * (1 + 1e-12)) fail("snapshot_times", "times must lie in [0, horizon]");

    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        detail::check_keys(o, "outputs", {"directory", "formats", "front", "iteration_log"});
        c.outputs.directory = o.value("directory", c.name);
        if (o.contains("formats")) {
            if (!o["formats"].is_array()) fail("outputs.formats", "expected an array");
            for (const auto& f : o["formats"]) {
                const std::string fs_ = f.is_string() ? f.get<std::string>() : "";
                if (fs_ == "csv") c.outputs.csv = true;
                else if (fs_ == "raw-f64") c.outputs.raw = true;
                else fail("outputs.formats", "expected csv or raw-f64");
            }
        }
        c.outputs.iteration_log = o.value("iteration_log", c.has_holes());
        if (o.contains("front")) {
            const json& f = o["front"];
            detail::check_keys(f, "outputs.front", {"axis", "from", "threshold", "interval", "fit_window"});
            FrontSpec fsp;
            fsp.axis = detail::axis_index(f.value("axis", json("y")), "outputs.front.axis");
            if (fsp.axis >= int(ext.size())) fail("outputs.front.axis", "axis exceeds grid dimension");
            const std::string from = f.value("from", "low");
            if (from != "low" && from != "high") fail("outputs.front.from", "expected low or high");
            fsp.from_high = from == "high";
            fsp.threshold = num(f.value("threshold", json(0.5)), "outputs.front.threshold");
            fsp.interval = num(f.value("interval", json(1.0)), "outputs.front.interval");
            if (!(fsp.interval > 0)) fail("outputs.front.interval", "must be positive");
            if (f.contains("fit_window")) {
                const auto w = detail::num_list(f["fit_window"], "outputs.front.fit_window", 2);
                if (!(w[0] < w[1])) fail("outputs.front.fit_window", "expected [t0, t1] with t0 < t1");
                fsp.fit_window = std::pair{w[0], w[1]};
            }
            c.outputs.front = fsp;
        }
    } else {
        c.outputs.directory = c.name;
        c.outputs.iteration_log = c.has_holes();
    }

    if (j.contains("reference")) {
        const json& r = j["reference"];
        detail::check_keys(r, "reference", {"dt_divisor", "h_divisor"});
        ReferenceSpec rs;
        rs.dt_divisor = r.value("dt_divisor", 1);
        rs.h_divisor = r.value("h_divisor", 1);
        if (rs.dt_divisor < 1 || rs.h_divisor < 1) fail("reference", "divisors must be >= 1");
        if (rs.dt_divisor == 1 && rs.h_divisor == 1) fail("reference", "reference must be finer than the scenario");
        c.reference = rs;
    }
    return c;
}

std::optional<std::string_view> builtin_scenario_text(std::string_view name) {
    for (const auto& [n, text] : builtin_scenarios)
        if (n == name) return text;
    return std::nullopt;
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
    json j;
    if (const auto text = builtin_scenario_text(name_or_path)) {
        j = json::parse(*text);
    } else {
        std::ifstream in(name_or_path);
        if (!in) throw ConfigError(name_or_path + ": not a builtin scenario and not a readable file");
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(name_or_path + ": " + e.what());
        }
    }
    return parse_scenario(j);
}

ScenarioConfig apply_horizon_scale(ScenarioConfig c, double s) {
    if (!(s > 0 && s <= 1)) throw ConfigError("horizon-scale must lie in (0, 1]");
    if (s == 1.0) return c;
    const long N = horizon_steps(c.horizon, c.scheme.dt);
    const long Ns = std::max(1L, std::lround(double(N) * s));
    c.horizon = double(Ns) * c.scheme.dt;
    for (double& t : c.snapshot_times) t = std::min(t * s, c.horizon);
    const double ls = std::sqrt(s);
    std::vector<double> ratio(c.extents.size());
    for (std::size_t r = 0; r < c.extents.size(); ++r) {
        const long n = std::max(4L, std::lround(c.extents[r] * ls / c.spacings[r]));
        const double e = double(n) * c.spacings[r];
        ratio[r] = e / c.extents[r];
        c.extents[r] = e;
    }
    for (auto& sh : c.shapes) {
        if (auto* ci = std::get_if<Circle>(&sh)) {
            for (std::size_t r = 0; r < ci->center.size(); ++r) ci->center[r] *= ratio[r];
        } else if (auto* cy = std::get_if<CylinderSegment>(&sh)) {
            for (std::size_t r = 0; r < c.extents.size(); ++r) {
                cy->p0[r] *= ratio[r];
                cy->p1[r] *= ratio[r];
            }
        } else if (auto* rp = std::get_if<RoughEdgeProfile>(&sh)) {
            rp->base *= ratio[std::size_t(rp->height_axis)];
        }
    }
    if (c.outputs.front && c.outputs.front->fit_window) {
        auto& w = *c.outputs.front->fit_window;
        w = {w.first * s, std::min(w.second * s, c.horizon)};
    }
    if (c.outputs.front) c.outputs.front->interval = std::max(c.scheme.dt, c.outputs.front->interval * s);
    return c;
}

ScenarioConfig refine(ScenarioConfig c, int dt_divisor, int h_divisor) {
    if (dt_divisor < 1 || h_divisor < 1) throw ConfigError("refinement divisors must be >= 1");
    // keep snapshots on coarse step boundaries so both runs sample identical times
    for (double& t : c.snapshot_times) t = double(std::lround(t / c.scheme.dt)) * c.scheme.dt;
    c.scheme.dt /= double(dt_divisor);
    for (double& h : c.spacings) h /= double(h_divisor);
    c.reference.reset();
    return c;
}

GridSpec grid_spec_of(const ScenarioConfig& c) {
    GridSpec g;
    g.extents = c.extents;
    g.bc = c.bc;
    for (std::size_t r = 0; r < c.extents.size(); ++r) {
        const long n = std::max(1L, std::lround(c.extents[r] / c.spacings[r]));
        g.interior_counts.push_back(int(n) - 1 + c.bc[r].neumann_ends());
    }
    g.validate();
    return g;
}

ScenarioSetup setup_scenario(const ScenarioConfig& c) {
    ScenarioSetup s;
    Grid g(grid_spec_of(c));
    s.shapes = c.shapes;
    for (std::size_t i = 0; i < s.shapes.size(); ++i) {
        auto* ci = std::get_if<Circle>(&s.shapes[i]);
        if (ci && i < c.snap_to_node.size() && c.snap_to_node[i]) {
            for (int r = 0; r < g.dim(); ++r) {
                const Axis& a = g.axis(r);
                const long k = std::lround(ci->center[std::size_t(r)] / a.spacing) - a.first_node();
                const int idx = int(std::clamp(k, 0L, long(a.count - 1)));
                ci->center[std::size_t(r)] = a.coordinate(idx);
            }
        }
    }
    s.disc = std::make_unique<Discretization>(g, c.params);
    s.initial.phi = Eigen::MatrixXd::Constant(g.rows(), g.cols(), c.phi0);
    s.initial.c = Eigen::MatrixXd::Constant(g.rows(), g.cols(), c.c0);
    if (c.has_holes()) {
        try {
            s.holes = std::make_unique<HoleDiscretization>(*s.disc, rasterize_mask(g, s.shapes));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("geometry: ") + e.what());
        }
        apply_hole_initial(s.initial, s.holes->mask());
    }
    if (c.w_auto) {
        // Frozen at run start: Jacobian scan over the initial fields and a 21x21 sample of [0,1]^2.
        const int n = 21;
        Eigen::MatrixXd sp(n * n + s.initial.phi.size(), 1), sc(sp.rows(), 1);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                sp(i * n + k, 0) = double(i) / (n - 1);
                sc(i * n + k, 0) = double(k) / (n - 1);
            }
        sp.bottomRows(s.initial.phi.size()) = s.initial.phi.reshaped();
        sc.bottomRows(s.initial.c.size()) = s.initial.c.reshaped();
        s.w = estimate_relaxation_w(c.params, {RelaxationMode::PerStepJacobianMax, 4.43e8, c.safety_factor}, &sp, &sc);
    } else {
        s.w = c.scheme.w;
    }
    return s;
}

fs::path output_root(const RunOptions& o) {
    if (!o.output_root.empty()) return o.output_root;
    if (const char* env = std::getenv("PITCORR_OUTPUT_ROOT"); env && *env) return env;
    return "pitcorr-out";
}

json scheme_metadata(const ScenarioConfig& c, double w) {
    json j = {{"order", to_string(c.scheme.order)}, {"dt", c.scheme.dt}, {"w", w}, {"horizon", c.horizon}};
    if (c.has_holes()) {
        j["variant"] = to_string(c.scheme.variant);
        j["eps"] = {c.scheme.eps1, c.scheme.eps2, c.scheme.eps3};
        j["stop_mode"] = c.scheme.stop_mode == StopMode::FullCriteria ? "full" : "reduced";
        j["max_iters"] = c.scheme.max_iters;
    }
    return j;
}

FieldPair restrict_to(const FieldPair& fine, const Grid& gf, const Grid& gc) {
    FieldPair out{Eigen::MatrixXd(gc.rows(), gc.cols()), Eigen::MatrixXd(gc.rows(), gc.cols()), fine.t, fine.step_index};
    std::array<int, 3> k{1, 1, 1};
    for (int r = 0; r < gc.dim(); ++r) {
        const double q = gc.axis(r).spacing / gf.axis(r).spacing;
        k[std::size_t(r)] = int(std::lround(q));
        if (std::abs(q - k[std::size_t(r)]) > 1e-9 * q) throw ConfigError("reference grid is not an integer refinement");
    }
    for (std::size_t p = 0; p < gc.size(); ++p) {
        const auto m = gc.multi_index(p);
        std::array<int, 3> f{0, 0, 0};
        for (int r = 0; r < gc.dim(); ++r) {
            const int first = gc.axis(r).first_node();
            f[std::size_t(r)] = (first + m[std::size_t(r)]) * k[std::size_t(r)] - first;
        }
        const std::size_t q = gf.index(f[0], f[1], f[2]);
        out.phi.data()[p] = fine.phi.data()[q];
        out.c.data()[p] = fine.c.data()[q];
    }
    return out;
}

std::string snapshot_stem(const FieldPair& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_%08ld", s.step_index);
    return buf;
}

std::vector<FieldPair> generate_reference(const ScenarioConfig& c, const RunOptions& opts) {
    if (!c.reference) throw ConfigError("reference: scenario has no reference block");
    const ScenarioConfig rc = refine(c, c.reference->dt_divisor, c.reference->h_divisor);
    RunOptions ro = opts;
    ro.write_outputs = false;
    ro.with_reference = false;
    ro.keep_snapshots = true;
    const RunArtifacts a = run_scenario(rc, ro);
    if (opts.write_outputs) {
        const fs::path dir = output_root(opts) / c.outputs.directory / "reference";
        fs::create_directories(dir);
        const ScenarioSetup setup = setup_scenario(rc);
        json meta = {{"scenario", c.name}, {"scheme", scheme_metadata(rc, a.w)},
                     {"provenance", {{"kind", "fine-step self reference"},
                                     {"dt_divisor", c.reference->dt_divisor},
                                     {"h_divisor", c.reference->h_divisor}}}};
        for (const auto& s : a.snapshots) write_snapshot_raw(s, setup.grid(), dir / (snapshot_stem(s) + ".f64"), meta);
    }
    return a.snapshots;
}

RunArtifacts run_scenario(const ScenarioConfig& c, const RunOptions& opts) {
    ScenarioSetup setup = setup_scenario(c);
    const Grid& g = setup.grid();
    RunArtifacts art;
    art.w = setup.w;
    const long N = horizon_steps(c.horizon, c.scheme.dt);
    long front_stride = 0;
    if (c.outputs.front) front_stride = std::max(1L, std::lround(c.outputs.front->interval / c.scheme.dt));

    auto& inst = instrumentation();
    const long f0 = inst.factorizations, s0 = inst.solves;
    RunHooks hooks;
    hooks.snapshot_times = c.snapshot_times;
    hooks.on_snapshot = [&](const FieldPair& s) {
        if (opts.keep_snapshots || opts.write_outputs) art.snapshots.push_back(s);
    };
    hooks.on_step = [&](const FieldPair& s, double ms) {
        if (front_stride > 0 && s.step_index % front_stride == 0) {
            try {
                const auto& f = *c.outputs.front;
                art.front.push_back({s.t, front_position(s, g, f.axis, f.threshold, f.from_high)});
            } catch (const std::runtime_error&) {
                // no crossing yet
            }
        }
        if (opts.on_step) opts.on_step(s, ms);
    };
    auto on_report = [&](const IterationReport& r) {
        art.iterations.push_back(r);
        if (opts.on_report) opts.on_report(r);
    };
    RunResult rr;
    if (c.has_holes()) {
        IterSchemeConfig sc = c.scheme;
        sc.w = setup.w;
        rr = run_holes(setup.initial, sc, *setup.holes, c.horizon, hooks, on_report);
    } else {
        rr = run_rect(setup.initial, SchemeConfig{c.scheme.order, c.scheme.dt, setup.w}, *setup.disc, c.horizon, hooks);
    }
    art.final_state = std::move(rr.final_state);
    art.timing = {rr.wall_seconds, rr.steps, inst.factorizations - f0, inst.solves - s0,
                  N > 0 ? rr.wall_seconds * 1e3 / double(N) : 0.0};

    if (c.outputs.front && c.outputs.front->fit_window) {
        std::vector<double> t, d2;
        for (const auto& f : art.front)
            if (f.t >= c.outputs.front->fit_window->first - 1e-9 && f.t <= c.outputs.front->fit_window->second + 1e-9) {
                t.push_back(f.t);
                d2.push_back(f.depth * f.depth);
            }
        if (t.size() >= 3) art.front_fit = linear_fit(t, d2);
    }

    if (c.reference && opts.with_reference) {
        const ScenarioConfig rc = refine(c, c.reference->dt_divisor, c.reference->h_divisor);
        const Grid gf(grid_spec_of(rc));
        std::vector<FieldPair> refs;
        const fs::path rdir = output_root(opts) / c.outputs.directory / "reference";
        bool loaded = false;
        if (fs::exists(rdir)) {
            try {
                for (const auto& s : art.snapshots) {
                    const long step = s.step_index * c.reference->dt_divisor;
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "snapshot_%08ld.f64", step);
                    refs.push_back(read_snapshot_raw(rdir / buf).state);
                }
                loaded = true;
            } catch (const std::exception&) {
                refs.clear();
            }
        }
        if (!loaded) refs = generate_reference(c, RunOptions{false, opts.output_root, false, true, {}, {}});
        for (const auto& s : art.snapshots) {
            for (const auto& r : refs) {
                if (std::abs(r.t - s.t) <= 1e-9 * std::max(1.0, s.t)) {
                    const FieldPair rr2 = restrict_to(r, gf, g);
                    try {
                        const auto [ep, ec] = error_norms(s, rr2);
                        art.errors.push_back({s.t, ep, ec});
                    } catch (const std::invalid_argument&) {
                    }
                    break;
                }
            }
        }
    }

    if (opts.write_outputs) {
        const fs::path dir = output_root(opts) / c.outputs.directory;
        fs::create_directories(dir);
        art.output_dir = dir;
        const json meta = {{"scenario", c.name}, {"scheme", scheme_metadata(c, setup.w)}};
        for (const auto& s : art.snapshots) {
            if (c.outputs.csv) write_snapshot_csv(s, g, dir / (snapshot_stem(s) + ".csv"));
            if (c.outputs.raw) write_snapshot_raw(s, g, dir / (snapshot_stem(s) + ".f64"), meta);
        }
        if (c.outputs.iteration_log && c.has_holes()) {
            std::ofstream log(dir / "iterations.csv");
            log << "step,t,k_phi,k_c,maxPhiTheta,maxCTheta,wall_ms\n";
            for (const auto& r : art.iterations)
                log << r.step << ',' << format_double(r.t) << ',' << r.k_phi << ',' << r.k_c << ','
                    << format_double(r.max_phi_theta) << ',' << format_double(r.max_c_theta) << ','
                    << format_double(r.wall_ms) << '\n';
        }
        if (c.outputs.front) {
            std::ofstream fr(dir / "front.csv");
            fr << "t,depth\n";
            for (const auto& f : art.front) fr << format_double(f.t) << ',' << format_double(f.depth) << '\n';
        }
        if (!art.errors.empty()) {
            std::ofstream er(dir / "errors.csv");
            er << "t,err_phi,err_c\n";
            for (const auto& e : art.errors)
                er << format_double(e.t) << ',' << format_double(e.err_phi) << ',' << format_double(e.err_c) << '\n';
        }
        json summary = {{"scenario", c.name},
                        {"grid", grid_metadata(g)},
                        {"scheme", scheme_metadata(c, setup.w)},
                        {"timing", {{"wall_seconds", art.timing.wall_seconds},
                                    {"steps", art.timing.steps},
                                    {"mean_step_ms", art.timing.mean_step_ms},
                                    {"factorizations", art.timing.factorizations},
                                    {"solves", art.timing.solves}}}};
        if (art.front_fit)
            summary["front_fit"] = {{"slope", art.front_fit->slope}, {"intercept", art.front_fit->intercept},
                                    {"r2", art.front_fit->r2}};
        if (setup.holes) {
            const auto [ep, ec] = theta_error(art.final_state, setup.holes->mask());
            summary["theta_error"] = {{"max_abs_phi", ep}, {"max_abs_c", ec}};
        }
        std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    }
    if (!opts.keep_snapshots && opts.write_outputs) art.snapshots.clear();
    return art;
}

ScalingReport scaling_report(const ScenarioConfig& base, ScalingKind kind, const std::vector<double>& multipliers) {
    if (multipliers.size() < 3) throw ConfigError("scaling sweep needs at least 3 points");
    ScalingReport rep{kind, {}, 0.0};
    std::vector<double> x, y;
    for (double m : multipliers) {
        if (!(m > 0)) throw ConfigError("scaling multipliers must be positive");
        ScenarioConfig c = base;
        c.reference.reset();
        c.snapshot_times.clear();
        c.outputs.front.reset();
        if (kind == ScalingKind::TimeStep) {
            c.scheme.dt *= m;
        } else {
            for (double& h : c.spacings) h *= m;
        }
        (void)horizon_steps(c.horizon, c.scheme.dt);
        RunOptions o;
        o.write_outputs = false;
        o.with_reference = false;
        o.keep_snapshots = false;
        const RunArtifacts a = run_scenario(c, o);
        const double param = kind == ScalingKind::TimeStep ? c.scheme.dt : c.spacings[0];
        rep.points.push_back({param, a.timing.wall_seconds, a.timing.steps, std::size_t(a.final_state.phi.size())});
        x.push_back(param);
        y.push_back(a.timing.wall_seconds);
    }
    rep.slope = loglog_slope(x, y);
    return rep;
}

} // namespace pitcorr::io
