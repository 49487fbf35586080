#pragma once

#include <cstdio>
#include <numbers>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitrec/splitrec.hpp"

namespace splitrec::cli {

/// Parses a single-token complex literal: `a`, `bi`, `a+bi`, `a-bi`
/// (no spaces, `i` suffix on the imaginary part).
inline cx parse_complex(const std::string& text) {
    static const std::regex full(
        R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?:([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i)?$)");
    static const std::regex imag_only(
        R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$)");
    std::smatch m;
    if (std::regex_match(text, m, full))
        return cx{std::stod(m[1].str()), m[2].matched ? std::stod(m[2].str()) : 0.0};
    if (std::regex_match(text, m, imag_only))
        return cx{0.0, std::stod(m[1].str())};
    throw CLI::ValidationError("complex", "expected a+bi, a-bi, a or bi: " + text);
}

struct SlabOptions {
    cx eps2{3.0, 0.03};
    double h = 2.0 * std::numbers::pi / 100.0;
    long n1 = 100, n2 = 1100, n3 = 1200;
    std::string rho = "local";
    std::string eps2_text;
    bool defaults_paper = false;

    void finalize() {
        if (defaults_paper) {
            eps2 = cx{3.0, 0.03};
            h = 2.0 * std::numbers::pi / 100.0;
            n1 = 100;
            n2 = 1100;
            n3 = 1200;
        } else if (!eps2_text.empty()) {
            eps2 = parse_complex(eps2_text);
        }
    }

    SlabProfile profile() const { return homogeneous_slab(eps2, h, n1, n2, n3); }

    RhoChoice choice() const {
        if (rho == "local")
            return RhoChoice::local_roots();
        return RhoChoice::constant(parse_complex(rho));
    }
};

struct OutputOptions {
    std::string path;  // empty = stdout
    std::string format = "csv";
};

inline void add_output_options(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--output,-o", out.path, "Output file (default: stdout)");
    cmd->add_option("--format,-f", out.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

inline void add_slab_options(CLI::App* cmd, SlabOptions& s, bool with_eps = true) {
    if (with_eps)
        cmd->add_option("--eps2", s.eps2_text,
                        "Interior permittivity as a complex literal (default 3+0.03i)");
    cmd->add_option("--step", s.h, "Grid step h")->capture_default_str();
    cmd->add_option("--n1", s.n1, "Last node of the left lead")->capture_default_str();
    cmd->add_option("--n2", s.n2, "Last node of the interior region")->capture_default_str();
    cmd->add_option("--n3", s.n3, "Last node of the grid")->capture_default_str();
    if (with_eps)
        cmd->add_flag("--defaults-paper", s.defaults_paper,
                      "Reference preset: h=2*pi/100, N1=100, N2=1100, N3=1200, eps2=3+0.03i");
    cmd->add_option("--rho", s.rho,
                    "Splitting choice: 'local' (per-node characteristic roots) or a "
                    "complex constant c (paired with 1/c)")
        ->capture_default_str();
}

inline ordered_json scatter_json(cx R, cx T) {
    return ordered_json{{"R", complex_to_json(R)}, {"T", complex_to_json(T)}};
}

inline const char* kFigureGuide =
    "Figure data recipes (CSV column in parentheses):\n"
    "  Fig. 1:   slab-smatrix --defaults-paper --rho local        (abs)\n"
    "  Fig. 2:   slab-smatrix --defaults-paper --rho 0.9          (abs)\n"
    "  Fig. 3:   slab-smatrix --defaults-paper                    (abs)\n"
    "  Fig. 4:   slab-pair --defaults-paper                       (y1_abs, y2_abs)\n"
    "  Fig. 5:   slab-inverse --defaults-paper                    (abs)\n"
    "  Fig. 6:   slab-inverse --defaults-paper                    (phase_rad)\n"
    "  Fig. 7:   slab-ramp                                        (value = log10 |y|)\n"
    "  Fig. 8:   cavity-design --u1 0.1 --cells 100               (u)\n"
    "  Fig. 9:   cavity-design --u1 0.1 --cells 100               (g)\n"
    "  Fig. 10:  cavity-backward --u1 0.1 --cells 100             (amplitude)\n"
    "  Fig. 11:  cavity-backward --u1 0.1 --cells 100             (phase_deviation)\n"
    "  Fig. 12:  cavity-design --u1 0.001 --cells 100 --q inf    (g, u)\n"
    "  Fig. 13:  cavity-backward --u1 0.001 --cells 100 --q inf  (amplitude)\n"
    "  Fig. 14:  cavity-backward --u1 0.001 --cells 100 --q inf  (phase_deviation)\n";

/// Runs the command line (without the program name). Returns 0 on
/// success, 1 on a domain error, 2 on a usage error.
inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Second-order linear recurrences as first-order 2-vector systems: "
                 "splitting transforms, transfer/scatter propagation, Riccati "
                 "diagonalization, and two worked applications (dielectric slab "
                 "diffraction, constant-gradient resonator chains)."};
    app.footer(kFigureGuide);
    app.require_subcommand(1);

    // --- slab-exact ------------------------------------------------------
    auto* exact = app.add_subcommand(
        "slab-exact", "Closed-form reflection/transmission of the homogeneous slab");
    struct {
        std::string eps2 = "3+0.03i";
        double xi1 = 2.0 * std::numbers::pi;
        double xi2 = 22.0 * std::numbers::pi;
        OutputOptions out{.path = "", .format = "json"};
    } ex;
    exact->add_option("--eps2", ex.eps2, "Slab permittivity (complex literal)")
        ->capture_default_str();
    exact->add_option("--xi1", ex.xi1, "Left slab edge")->capture_default_str();
    exact->add_option("--xi2", ex.xi2, "Right slab edge")->capture_default_str();
    add_output_options(exact, ex.out);
    exact->callback([&] {
        const auto [R, T] = analytic_slab_rt(parse_complex(ex.eps2), ex.xi1, ex.xi2);
        if (ex.out.format == "json") {
            write_output(ex.out.path, scatter_json(R, T).dump(2) + "\n");
        } else {
            std::string csv = "name,re,im,abs,phase_rad\n";
            for (const auto& [name, v] : {std::pair<const char*, cx>{"R", R}, {"T", T}})
                csv += std::string(name) + "," + format_number(v.real()) + "," +
                       format_number(v.imag()) + "," + format_number(std::abs(v)) + "," +
                       format_number(std::arg(v)) + "\n";
            write_output(ex.out.path, csv);
        }
    });

    // --- slab-smatrix ----------------------------------------------------
    auto* smatrix = app.add_subcommand(
        "slab-smatrix", "Scatter-matrix solve of the discretized slab (stable two-point "
                        "sweep); CSV holds the total field Y_k");
    struct {
        SlabOptions slab;
        OutputOptions out;
    } sm;
    add_slab_options(smatrix, sm.slab);
    add_output_options(smatrix, sm.out);
    smatrix->callback([&] {
        sm.slab.finalize();
        const ScatterResult res = solve_forward_smatrix(sm.slab.profile(), sm.slab.choice());
        if (sm.out.format == "json") {
            ordered_json j = scatter_json(res.R, res.T);
            j["field"] = complex_series_json(res.field);
            write_output(sm.out.path, j.dump(2) + "\n");
        } else {
            write_output(sm.out.path, complex_series_csv(res.field));
        }
    });

    // --- slab-pair -------------------------------------------------------
    auto* pair_cmd = app.add_subcommand(
        "slab-pair", "Two independent solutions from forward Riccati sweeps seeded with "
                     "the vacuum characteristic roots");
    struct {
        SlabOptions slab;
        OutputOptions out;
    } pr;
    add_slab_options(pair_cmd, pr.slab);
    add_output_options(pair_cmd, pr.out);
    pair_cmd->callback([&] {
        pr.slab.finalize();
        const IndependentPair res = solve_independent_pair(pr.slab.profile());
        if (pr.out.format == "json") {
            ordered_json j;
            j["y1"] = complex_series_json(res.y1);
            j["y2"] = complex_series_json(res.y2);
            write_output(pr.out.path, j.dump(2) + "\n");
        } else {
            const auto& v1 = res.y1.values();
            const auto& v2 = res.y2.values();
            const std::size_t n = std::min(v1.size(), v2.size());
            std::vector<double> c1(n), c2(n), c3(n), c4(n), m1(n), m2(n);
            for (std::size_t i = 0; i < n; ++i) {
                c1[i] = v1[i].real();
                c2[i] = v1[i].imag();
                m1[i] = std::abs(v1[i]);
                c3[i] = v2[i].real();
                c4[i] = v2[i].imag();
                m2[i] = std::abs(v2[i]);
            }
            write_output(pr.out.path,
                         real_table_csv(1, {{"y1_re", c1},
                                            {"y1_im", c2},
                                            {"y1_abs", m1},
                                            {"y2_re", c3},
                                            {"y2_im", c4},
                                            {"y2_abs", m2}}));
        }
    });

    // --- slab-inverse ----------------------------------------------------
    auto* inverse = app.add_subcommand(
        "slab-inverse", "Downward Riccati sweep from the transmitted side; CSV holds the "
                        "reconstructed field");
    struct {
        SlabOptions slab;
        double terminal_mod = 0.531;
        double terminal_arg = 1.9865;
        OutputOptions out;
    } iv;
    add_slab_options(inverse, iv.slab);
    inverse->add_option("--terminal-mod", iv.terminal_mod,
                        "Modulus of the transmitted field at the last node")
        ->capture_default_str();
    inverse->add_option("--terminal-arg", iv.terminal_arg,
                        "Phase (radians) of the transmitted field at the last node")
        ->capture_default_str();
    add_output_options(inverse, iv.out);
    inverse->callback([&] {
        iv.slab.finalize();
        const cx terminal = iv.terminal_mod * std::exp(cx{0.0, iv.terminal_arg});
        const InverseResult res = solve_inverse_scheme(iv.slab.profile(), terminal);
        if (iv.out.format == "json") {
            ordered_json j = scatter_json(res.R, res.T);
            j["field"] = complex_series_json(res.y1);
            write_output(iv.out.path, j.dump(2) + "\n");
        } else {
            write_output(iv.out.path, complex_series_csv(res.y1));
        }
    });

    // --- slab-ramp -------------------------------------------------------
    auto* ramp = app.add_subcommand(
        "slab-ramp", "Linear permittivity ramp into an evanescent region: the transfer "
                     "sweep overflows, the scatter sweep does not; CSV holds log10|y| of "
                     "the transfer sweep up to the overflow point");
    struct {
        SlabOptions slab;
        OutputOptions out;
    } rp;
    rp.slab.n1 = 100;
    rp.slab.n2 = 12100;
    rp.slab.n3 = 12200;
    add_slab_options(ramp, rp.slab, /*with_eps=*/false);
    add_output_options(ramp, rp.out);
    ramp->callback([&] {
        const SlabProfile p = ramp_slab(rp.slab.h, rp.slab.n1, rp.slab.n2, rp.slab.n3);
        const RecurrenceCoefficients coeffs = discretize(p);
        const SplitSequences split = slab_split(p, rp.slab.choice());
        const TransferRun run =
            propagate_transfer(coeffs, split, SplitState{1.0, 0.0}, p.n3 - 1);
        std::vector<double> growth;
        growth.reserve(run.states.size());
        for (const SplitState& s : run.states)
            growth.push_back(std::log10(std::max(std::abs(s.y1 + s.y2), 1e-300)));

        bool scatter_ok = true;
        cx scatter_R{}, scatter_T{};
        try {
            const ScatterResult res = solve_forward_smatrix(p, rp.slab.choice());
            scatter_R = res.R;
            scatter_T = res.T;
        } catch (const Error&) {
            scatter_ok = false;
        }
        if (rp.out.format == "json") {
            ordered_json j;
            j["transfer_overflow_at"] =
                run.overflow_at ? ordered_json(*run.overflow_at) : ordered_json(nullptr);
            j["transfer_log10_abs"] = growth;
            j["scatter_completed"] = scatter_ok;
            if (scatter_ok) {
                j["R"] = complex_to_json(scatter_R);
                j["T"] = complex_to_json(scatter_T);
            }
            write_output(rp.out.path, j.dump(2) + "\n");
        } else {
            write_output(rp.out.path, real_series_csv(run.first_index, growth));
        }
    });

    // --- cavity-design ---------------------------------------------------
    auto* design = app.add_subcommand(
        "cavity-design", "Resonator chain with flat forward-field amplitude and fixed "
                         "phase advance per cell; CSV holds g_k, u_k");
    struct {
        double u1 = 0.03;
        double phi = 2.0 * std::numbers::pi / 3.0;
        double q = 1e4;
        long cells = 100;
        OutputOptions out;
    } cd;
    design->add_option("--u1", cd.u1, "First coupling parameter")->capture_default_str();
    design->add_option("--phi", cd.phi, "Phase advance per cell (radians)")
        ->capture_default_str();
    design->add_option("--q", cd.q, "Quality factor (inf for lossless)")
        ->capture_default_str();
    design->add_option("--cells", cd.cells, "Number of cells")->capture_default_str();
    add_output_options(design, cd.out);
    design->callback([&] {
        const ChainDesign d = design_constant_gradient(cd.u1, cd.phi, cd.q, cd.cells);
        std::vector<double> u_head(d.u.begin(), d.u.end() - 1);
        if (cd.out.format == "json") {
            ordered_json j;
            j["phi"] = d.phi;
            j["Q"] = d.Q;
            j["g"] = d.g;
            j["u"] = d.u;
            write_output(cd.out.path, j.dump(2) + "\n");
        } else {
            write_output(cd.out.path, real_table_csv(1, {{"g", d.g}, {"u", u_head}}));
        }
    });

    // --- cavity-backward -------------------------------------------------
    auto* backward = app.add_subcommand(
        "cavity-backward", "Backward-field structure of the designed chain; CSV holds "
                           "amplitude and phase deviation from a uniform -phi per cell");
    struct {
        double u1 = 0.1;
        double phi = 2.0 * std::numbers::pi / 3.0;
        double q = 1e4;
        long cells = 100;
        int ratio_exponent = 1;
        OutputOptions out;
    } cb;
    backward->add_option("--u1", cb.u1, "First coupling parameter")->capture_default_str();
    backward->add_option("--phi", cb.phi, "Phase advance per cell (radians)")
        ->capture_default_str();
    backward->add_option("--q", cb.q, "Quality factor (inf for lossless)")
        ->capture_default_str();
    backward->add_option("--cells", cb.cells, "Number of cells")->capture_default_str();
    backward->add_option("--ratio-exponent", cb.ratio_exponent,
                         "Exponent on the coupling ratio u_k/u_{k+1} in the backward "
                         "recurrence (1 or 3)")
        ->capture_default_str();
    add_output_options(backward, cb.out);
    backward->callback([&] {
        const ChainDesign d = design_constant_gradient(cb.u1, cb.phi, cb.q, cb.cells);
        const BackwardField bf = backward_field(d, cb.ratio_exponent);
        std::vector<double> amplitude;
        amplitude.reserve(bf.y2.values().size());
        for (const cx& v : bf.y2.values())
            amplitude.push_back(std::abs(v));
        if (cb.out.format == "json") {
            ordered_json j;
            j["amplitude"] = amplitude;
            j["phase_deviation"] = bf.phase_deviation;
            j["diverged_at"] = bf.trace.diverged_at ? ordered_json(*bf.trace.diverged_at)
                                                    : ordered_json(nullptr);
            write_output(cb.out.path, j.dump(2) + "\n");
        } else {
            write_output(cb.out.path,
                         real_table_csv(1, {{"amplitude", amplitude},
                                            {"phase_deviation", bf.phase_deviation}}));
        }
    });

    // --- selftest ----------------------------------------------------------
    auto* self = app.add_subcommand(
        "selftest", "Run the acceptance battery and print one PASS/FAIL line per "
                    "criterion; exits nonzero if any criterion fails");
    bool any_failed = false;
    self->callback([&] {
        const std::vector<CriterionResult> results =
            run_acceptance([](const std::vector<std::string>& a) { return run_cli(a); });
        for (const CriterionResult& r : results) {
            std::printf("%s — %s%s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                        r.detail.empty() ? "" : " (", r.detail.c_str(),
                        r.detail.empty() ? "" : ")");
            any_failed = any_failed || !r.pass;
        }
    });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("splitrec");
    for (const std::string& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return any_failed ? 1 : 0;
}

}  // namespace splitrec::cli
