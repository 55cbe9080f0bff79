#include "adveig/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "adveig/analysis.hpp"
#include "adveig/config.hpp"
#include "adveig/errors.hpp"
#include "adveig/functional.hpp"
#include "adveig/report.hpp"

namespace adveig {

namespace {

Json config_json(const ProblemConfig& cfg) {
    Json obj = Json::object();
    for (const auto& [k, v] : cfg.effective()) obj.set(k, Json::string(v));
    return obj;
}

std::string grid_label(const ProblemConfig& cfg) {
    if (cfg.dim == 1) return "nx=" + std::to_string(cfg.nx);
    return "nx=" + std::to_string(cfg.nx) + ",ny=" + std::to_string(cfg.ny);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

CsvTable sweep_csv(const SweepReport& rep) {
    CsvTable t;
    t.header = {"A", "lambda", "dlambda_formula", "dlambda_central", "residual", "positivity"};
    const bool with_sym = !rep.lambda_sym.empty();
    if (with_sym) t.header.push_back("lambda_sym");
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const SweepRow& r = rep.rows[i];
        std::vector<std::string> row{
            format_double(r.amplitude),
            r.failed ? "nan" : format_double(r.lambda),
            r.has_derivatives ? format_double(r.dlam_formula) : "nan",
            r.has_derivatives ? format_double(r.dlam_central) : "nan",
            r.failed ? "nan" : format_double(r.residual),
            r.positivity ? "1" : "0"};
        if (with_sym) row.push_back(format_double(rep.lambda_sym[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Json sweep_json(const SweepReport& rep, const ProblemConfig& cfg) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const SweepRow& r = rep.rows[i];
        Json jr = Json::object();
        jr.set("A", Json::number(r.amplitude));
        if (r.failed) {
            jr.set("failed", Json::boolean(true));
            jr.set("error", Json::string(r.error));
        } else {
            jr.set("lambda", Json::number(r.lambda));
            jr.set("residual", Json::number(r.residual));
            jr.set("positivity", Json::boolean(r.positivity));
            if (r.has_derivatives) {
                jr.set("dlambda_formula", Json::number(r.dlam_formula));
                jr.set("dlambda_central", Json::number(r.dlam_central));
            }
            if (!rep.lambda_sym.empty())
                jr.set("lambda_sym", Json::number(rep.lambda_sym[i]));
        }
        rows.push(std::move(jr));
    }
    Json j = Json::object();
    j.set("classification", Json::string(to_string(rep.classification)));
    j.set("regime", Json::string(rep.regime));
    j.set("first_integral_indicator", Json::number(rep.first_integral_indicator));
    j.set("div_residual", Json::number(rep.div_residual));
    j.set("flux_residual", Json::number(rep.flux_residual));
    j.set("compliant", Json::boolean(rep.compliant));
    j.set("lambda0", Json::number(rep.lambda0));
    j.set("flat_ok", Json::boolean(rep.flat_ok));
    j.set("monotone_ok", Json::boolean(rep.monotone_ok));
    if (!rep.lambda_sym.empty()) j.set("sym_ok", Json::boolean(rep.sym_ok));
    j.set("rows", std::move(rows));
    j.set("config", config_json(cfg));
    return j;
}

int cmd_solve(const ProblemConfig& cfg, bool dump_matrix) {
    ProblemSpec spec = to_problem(cfg);
    const double amplitude = cfg.amplitudes.front();
    Solved s = solve_problem(spec, amplitude);
    const auto& w = spec.grid->weights();
    const double int_u2 =
        kernels::dot3(w.data(), s.pair.u.data(), s.pair.u.data(), w.size());
    const double int_uv =
        kernels::dot3(w.data(), s.pair.u.data(), s.pair.v.data(), w.size());

    Json j = Json::object();
    j.set("A", Json::number(amplitude));
    j.set("lambda", Json::number(s.pair.lambda));
    j.set("iterations", Json::integer(s.pair.iterations));
    j.set("residual_u", Json::number(s.pair.residual_u));
    j.set("residual_v", Json::number(s.pair.residual_v));
    j.set("positivity_ok", Json::boolean(s.pair.positivity_ok));
    j.set("peclet_warning", Json::boolean(s.pair.peclet_warning));
    j.set("int_u2", Json::number(int_u2));
    j.set("int_uv", Json::number(int_uv));
    j.set("grid", Json::string(grid_label(cfg)));
    j.set("config", config_json(cfg));
    write_text_file(join_path(cfg.out_dir, "eig.json"), j.dump());
    write_csv(s.pair.u, join_path(cfg.out_dir, "u.csv"));
    write_csv(s.pair.v, join_path(cfg.out_dir, "v.csv"));
    if (dump_matrix) {
        write_matrix_market(s.m, join_path(cfg.out_dir, "matrix.mtx"));
        write_matrix_market(s.m_adj, join_path(cfg.out_dir, "matrix_adjoint.mtx"));
    }
    return 0;
}

int cmd_sweep(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    SweepReport rep = sweep(spec, cfg.amplitudes);
    write_csv_file(join_path(cfg.out_dir, "sweep.csv"), sweep_csv(rep));
    write_text_file(join_path(cfg.out_dir, "sweep.json"), sweep_json(rep, cfg).dump());
    return rep.regime == "discretization-failure" ? 2 : 0;
}

struct CheckRecord {
    std::string check;
    double residual, tolerance;
    bool pass;
};

Json records_json(const std::vector<CheckRecord>& records, const ProblemConfig& cfg) {
    Json arr = Json::array();
    for (const auto& r : records) {
        Json jr = Json::object();
        jr.set("check", Json::string(r.check));
        jr.set("grid", Json::string(grid_label(cfg)));
        jr.set("residual", Json::number(r.residual));
        jr.set("tolerance", Json::number(r.tolerance));
        jr.set("pass", Json::boolean(r.pass));
        arr.push(std::move(jr));
    }
    Json j = Json::object();
    j.set("records", std::move(arr));
    j.set("config", config_json(cfg));
    return j;
}

int cmd_verify(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    std::vector<CheckRecord> records;
    std::mt19937_64 rng(0x7e57ed5eULL);
    for (double amplitude : cfg.amplitudes) {
        Solved s = solve_problem(spec, amplitude);
        const EigenPair& pair = s.pair;
        const double lam = pair.lambda;
        const std::string tag = " @A=" + format_double(amplitude);

        ConeElement eu = make_cone_element(pair.u, spec.bc, spec.a);
        const double j_u = eval_J(eu, pair, s.m);
        const double r0 = std::fabs(j_u - lam) / (1.0 + std::fabs(lam));
        records.push_back({"J(u)=lambda" + tag, r0, 1e-7, r0 <= 1e-7});

        double worst_l2 = 0.0;
        for (int k = 0; k < 20; ++k) {
            ScalarField phi = random_cos_field(*spec.grid, rng);
            ConeElement omega = cone_perturb(pair, phi, 0.1, spec.bc, spec.a);
            worst_l2 = std::max(worst_l2, lemma2_residual(omega, pair, s.m, spec.a));
        }
        records.push_back({"lemma2.2" + tag, worst_l2, 5e-6, worst_l2 <= 5e-6});

        const double rc = corollary_residual(pair, s.m, spec.a);
        records.push_back({"corollary2.3" + tag, rc, 1e-5, rc <= 1e-5});

        double worst_cr = 0.0;
        const double t = 1e-4;
        for (int k = 0; k < 10; ++k) {
            ScalarField phi = random_cos_field(*spec.grid, rng);
            ConeElement op = cone_perturb(pair, phi, t, spec.bc, spec.a);
            ConeElement om = cone_perturb(pair, phi, -t, spec.bc, spec.a);
            const double d = (eval_J(op, pair, s.m) - eval_J(om, pair, s.m)) / (2.0 * t);
            worst_cr = std::max(worst_cr, std::fabs(d));
        }
        const double tol_cr = 1e-5 * (1.0 + std::fabs(lam));
        records.push_back({"criticality" + tag, worst_cr, tol_cr, worst_cr <= tol_cr});
    }
    write_text_file(join_path(cfg.out_dir, "verify.json"), records_json(records, cfg).dump());
    for (const auto& r : records)
        if (!r.pass) return 2;
    return 0;
}

int cmd_minmax(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    Json arr = Json::array();
    bool all_pass = true;
    for (double amplitude : cfg.amplitudes) {
        MinmaxReport rep = minmax_verify(spec, amplitude);
        all_pass = all_pass && rep.pass();
        Json jr = Json::object();
        jr.set("A", Json::number(amplitude));
        jr.set("lambda", Json::number(rep.lambda));
        jr.set("peak_offset", Json::number(rep.worst_peak_offset));
        jr.set("peak_gap", Json::number(rep.worst_peak_gap));
        jr.set("weight_gap", Json::number(rep.weight_gap));
        jr.set("ratio_spread", Json::number(rep.ratio_spread));
        jr.set("scan_step", Json::number(rep.scan_step));
        jr.set("tolerance", Json::number(rep.tol));
        jr.set("pass", Json::boolean(rep.pass()));
        arr.push(std::move(jr));
    }
    Json j = Json::object();
    j.set("checks", std::move(arr));
    j.set("config", config_json(cfg));
    write_text_file(join_path(cfg.out_dir, "minmax.json"), j.dump());
    return all_pass ? 0 : 2;
}

int cmd_bound(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    FirstIntegralFamily fam = build_first_integral_family(spec, cfg.fi_degree);
    const double bound = first_integral_bound(spec, fam);
    Json j = Json::object();
    j.set("bound", Json::number(bound));
    j.set("family_size", Json::integer(static_cast<long long>(fam.fields.size())));
    j.set("membership_residual", Json::number(fam.membership_residual));
    j.set("config", config_json(cfg));
    write_text_file(join_path(cfg.out_dir, "bound.json"), j.dump());
    return 0;
}

int cmd_limit(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    const double a_max = cfg.a_max > 0.0 ? cfg.a_max : cfg.amplitudes.back();
    LimitReport rep = limit_probe(spec, a_max, 1e-3, cfg.fi_degree);
    Json j = Json::object();
    Json amps = Json::array(), lams = Json::array();
    for (double a : rep.amplitudes) amps.push(Json::number(a));
    for (double l : rep.lambdas) lams.push(Json::number(l));
    j.set("amplitudes", std::move(amps));
    j.set("lambdas", std::move(lams));
    j.set("limit_estimate", Json::number(rep.limit_estimate));
    j.set("bound", Json::number(rep.bound));
    j.set("gap", Json::number(rep.gap));
    j.set("cauchy", Json::boolean(rep.cauchy));
    j.set("monotone_ok", Json::boolean(rep.monotone_ok));
    j.set("within_bound", Json::boolean(rep.within_bound));
    j.set("config", config_json(cfg));
    write_text_file(join_path(cfg.out_dir, "limit.json"), j.dump());
    return rep.monotone_ok && rep.within_bound ? 0 : 2;
}

int cmd_counterexample(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    CounterexampleReport rep = counterexample_probe(spec, cfg.amplitudes.back(), cfg.ce_delta);
    Json j = Json::object();
    j.set("lambda0", Json::number(rep.lambda0));
    j.set("lambda_large", Json::number(rep.lambda_large));
    j.set("c_at_0", Json::number(rep.c_at_0));
    j.set("flux_residual", Json::number(rep.flux_residual));
    j.set("decreased", Json::boolean(rep.decreased));
    j.set("near_limit", Json::boolean(rep.near_limit));
    j.set("non_compliant_flow", Json::boolean(true));
    j.set("config", config_json(cfg));
    write_text_file(join_path(cfg.out_dir, "counterexample.json"), j.dump());
    return rep.pass() ? 0 : 2;
}

int cmd_gradflow(const ProblemConfig& cfg) {
    ProblemSpec spec = to_problem(cfg);
    SweepReport rep = gradient_flow_sweep(spec, cfg.amplitudes);
    write_csv_file(join_path(cfg.out_dir, "gradflow.csv"), sweep_csv(rep));
    write_text_file(join_path(cfg.out_dir, "gradflow.json"), sweep_json(rep, cfg).dump());
    return rep.sym_ok && rep.regime != "discretization-failure" ? 0 : 2;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"advection-diffusion principal-eigenvalue laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_override, a_override;
    int nx_override = 0, ny_override = 0;
    bool dump_matrix = false;

    const std::vector<std::string> names = {"solve",  "sweep", "verify",         "minmax",
                                            "bound",  "limit", "counterexample", "gradflow"};
    for (const std::string& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "problem config file")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--nx", nx_override, "grid override");
        sub->add_option("--ny", ny_override, "grid override");
        sub->add_option("--A", a_override, "amplitude list override, comma separated");
        if (name == "solve") sub->add_flag("--dump-matrix", dump_matrix, "write MatrixMarket files");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        ProblemConfig cfg = load_config(config_path);
        if (nx_override > 0) cfg.nx = nx_override;
        if (ny_override > 0) {
            cfg.ny = ny_override;
            if (cfg.dim == 1) cfg.dim = 2;
        }
        if (!a_override.empty()) cfg.amplitudes = parse_amplitude_list(a_override);
        if (!out_override.empty()) cfg.out_dir = out_override;
        std::filesystem::create_directories(cfg.out_dir);

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "solve") return cmd_solve(cfg, dump_matrix);
        if (name == "sweep") return cmd_sweep(cfg);
        if (name == "verify") return cmd_verify(cfg);
        if (name == "minmax") return cmd_minmax(cfg);
        if (name == "bound") return cmd_bound(cfg);
        if (name == "limit") return cmd_limit(cfg);
        if (name == "counterexample") return cmd_counterexample(cfg);
        if (name == "gradflow") return cmd_gradflow(cfg);
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.kind() == "ConfigError" ? 1 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int run_command(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("adveig");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& s : full) argv.push_back(s.c_str());
    return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace adveig
