// pcd: proximity-catch-digraph spatial pattern tests.
//
// Subcommands: test, simulate, pr-curve, generate. JSON for structured
// results, CSV for tabular series. Exit codes: 0 ok, 2 usage/validation
// error, 3 data error, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcd/inference.hpp"
#include "pcd/io.hpp"
#include "pcd/simulation.hpp"

using namespace pcd;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "pcd 0.1.0";

int exit_code_for(errc c) {
    switch (c) {
        case errc::invalid_argument:
        case errc::unsupported_key:
        case errc::r_out_of_range:
        case errc::epsilon_out_of_range:
        case errc::not_covered:
        case errc::degenerate_regime:
            return 2;
        case errc::data_error:
        case errc::collinear_input:
        case errc::duplicate_points:
        case errc::degenerate_triangle:
        case errc::m_outside_triangle:
        case errc::p_outside_triangle:
        case errc::too_large:
            return 3;
        case errc::r_degenerate:
        case errc::non_convergence:
        case errc::numerical_breakdown:
            return 4;
    }
    return 4;
}

Expansion parse_r(const std::string& s) {
    if (s == "inf" || s == "infinity") return Expansion::infinite();
    try {
        return Expansion(std::stod(s));
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(errc::invalid_argument, "--r expects a number >= 1 or 'inf'");
    }
}

CenterSpec parse_center(const std::string& s) {
    if (s == "mc" || s == "centroid") return CenterSpec::mass_center();
    if (s == "t1") return CenterSpec::tau(0);
    if (s == "t2") return CenterSpec::tau(1);
    if (s == "t3") return CenterSpec::tau(2);
    double w[3];
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &w[0], &w[1], &w[2]) == 3)
        return CenterSpec::at({w[0], w[1], w[2]});
    fail(errc::invalid_argument,
         "--center expects mc, t1, t2, t3 or three comma-separated barycentric weights");
}

// epsilon from the carved-area fraction delta (segregation) or the support
// area fraction (association)
double epsilon_from_delta(double delta, AlternativeSpec::Kind kind) {
    const double s3 = std::sqrt(3.0);
    if (!(delta > 0.0 && delta < 1.0))
        fail(errc::epsilon_out_of_range, "--delta must lie in (0, 1)");
    if (kind == AlternativeSpec::Kind::segregation) {
        if (delta <= 0.75) return std::sqrt(delta) / 2.0;
        return (1.0 - std::sqrt(1.0 - delta) / 2.0) / s3;
    }
    const double s = delta <= 0.75 ? std::sqrt(delta / 3.0) : (2.0 - std::sqrt(1.0 - delta)) / 3.0;
    return s3 / 3.0 - s3 * s / 2.0;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::data_error, "cannot open " + path + " for writing");
    out << text;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

struct TestArgs {
    std::string x_path, y_path, out, dump_tri;
    std::string r = "1.5";
    std::string center = "mc";
    double alpha = 0.05;
    std::string alternative = "segregation";
    std::string statistic = "normal";
    bool hull_correction = false;
    bool small_sample = false;
    double rel_tol = 1e-8;
};

int run_test_cmd(const TestArgs& a) {
    TestConfig cfg;
    cfg.params = {parse_r(a.r), parse_center(a.center)};
    cfg.alpha = a.alpha;
    cfg.alternative =
        a.alternative == "association" ? Alternative::association : Alternative::segregation;
    cfg.statistic = a.statistic == "binomial" ? Statistic::binomial : Statistic::normal;
    cfg.hull_correction = a.hull_correction;
    cfg.small_sample_correction = a.small_sample;
    cfg.quad.rel_tol = a.rel_tol;

    const auto x = read_points_csv(a.x_path);
    const auto y = read_points_csv(a.y_path);

    if (!a.dump_tri.empty()) {
        const Triangulation tri =
            y.size() == 3 ? single_triangle(y) : delaunay_triangulate(y);
        write_text(a.dump_tri, triangulation_json(tri).dump(2) + "\n");
    }

    const TestResult res = run_test(x, y, cfg);
    write_text(a.out, test_result_json(res).dump(2) + "\n");
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string pattern = "csr";
    std::optional<double> epsilon;
    std::optional<double> delta;
    int n = 0;
    std::string y_path, out;
    std::uint64_t seed = 1;
};

int run_generate(const GenerateArgs& a) {
    AlternativeSpec spec = AlternativeSpec::csr();
    std::string mapping = "pattern=csr";
    if (a.pattern != "csr") {
        const auto kind = a.pattern == "segregation" ? AlternativeSpec::Kind::segregation
                                                     : AlternativeSpec::Kind::association;
        if (a.epsilon && a.delta)
            fail(errc::invalid_argument, "--epsilon and --delta are mutually exclusive");
        double eps;
        if (a.epsilon) {
            eps = *a.epsilon;
            mapping = "pattern=" + a.pattern + " epsilon=" + format_double(eps);
        } else if (a.delta) {
            eps = epsilon_from_delta(*a.delta, kind);
            mapping = "pattern=" + a.pattern + " delta=" + format_double(*a.delta) +
                      " epsilon=" + format_double(eps);
        } else {
            fail(errc::invalid_argument, "segregation/association need --epsilon or --delta");
        }
        spec = kind == AlternativeSpec::Kind::segregation ? AlternativeSpec::segregation(eps)
                                                          : AlternativeSpec::association(eps);
    }
    if (a.n <= 0) fail(errc::invalid_argument, "--n must be positive");

    const auto y = read_points_csv(a.y_path);
    const Triangulation tri = y.size() == 3 ? single_triangle(y) : delaunay_triangulate(y);
    Rng rng = Rng(a.seed).substream(0);
    const auto pts = sample_alternative(tri, a.n, spec, rng);

    std::ostringstream head;
    head << mapping << " n=" << a.n << " seed=" << a.seed;
    if (a.out.empty() || a.out == "-") {
        std::cout << "# " << head.str() << "\nx,y\n";
        for (const Point2& p : pts)
            std::cout << format_double(p.x) << "," << format_double(p.y) << "\n";
    } else {
        write_points_csv(a.out, pts, head.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// pr-curve
// ---------------------------------------------------------------------------

int run_pr_curve(double from, double to, double step, double rel_tol, const std::string& out) {
    if (!(step > 0.0) || !(from <= to))
        fail(errc::invalid_argument, "--from/--to/--step must describe a forward grid");
    if (!(from > 1.0) || !(to <= 1.5))
        fail(errc::invalid_argument, "p_r is defined on (1, 1.5]: need 1 < --from <= --to <= 1.5");
    QuadratureConfig cfg;
    cfg.rel_tol = rel_tol;
    std::ostringstream os;
    os << "r,p_r,abs_err\n";
    for (double r = from; r <= to + 1e-12; r += step) {
        const PrResult pr = p_r(std::min(r, 1.5), cfg);
        os << format_double(r) << "," << format_double(pr.value) << ","
           << format_double(pr.abs_err) << "\n";
    }
    write_text(out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

std::vector<double> grid_from_json(const json& j) {
    std::vector<double> grid;
    if (j.is_array()) {
        for (const auto& v : j) grid.push_back(v.get<double>());
    } else if (j.is_object()) {
        const double from = j.at("from").get<double>();
        const double to = j.at("to").get<double>();
        const double step = j.at("step").get<double>();
        if (!(step > 0)) fail(errc::invalid_argument, "r grid step must be positive");
        for (double r = from; r <= to + 1e-12; r += step) grid.push_back(r);
    } else {
        grid.push_back(j.get<double>());
    }
    return grid;
}

AlternativeSpec pattern_from_json(const json& j) {
    if (!j.is_object()) return AlternativeSpec::csr();
    const std::string kind = j.value("kind", "csr");
    if (kind == "csr") return AlternativeSpec::csr();
    const auto k = kind == "segregation" ? AlternativeSpec::Kind::segregation
                                         : AlternativeSpec::Kind::association;
    double eps;
    if (j.contains("epsilon")) eps = j.at("epsilon").get<double>();
    else if (j.contains("delta")) eps = epsilon_from_delta(j.at("delta").get<double>(), k);
    else fail(errc::invalid_argument, "pattern needs epsilon or delta");
    return k == AlternativeSpec::Kind::segregation ? AlternativeSpec::segregation(eps)
                                                   : AlternativeSpec::association(eps);
}

struct SimArgs {
    std::string config_path, out_dir;
    int threads_override = -1;
    std::optional<std::uint64_t> seed_override;
};

int run_simulate(const SimArgs& a) {
    std::ifstream in(a.config_path);
    if (!in) fail(errc::data_error, "cannot open " + a.config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        fail(errc::data_error, std::string("bad config JSON: ") + e.what());
    }

    const std::string mode = cfg.value("mode", "freq");
    const std::uint64_t seed =
        a.seed_override ? *a.seed_override : cfg.value("seed", 1ULL);
    const int n_mc = cfg.value("n_mc", 1000);
    int threads = a.threads_override >= 0 ? a.threads_override : cfg.value("threads", 0);

    std::filesystem::create_directories(a.out_dir);
    const std::string stamp = "seed=" + std::to_string(seed) +
                              " config_hash=" + hex64(fnv1a(cfg.dump()));

    auto load_y = [&]() -> Triangulation {
        if (!cfg.contains("y") || !cfg.at("y").is_string())
            fail(errc::invalid_argument, "config needs \"y\": path for this mode");
        const auto y = read_points_csv(cfg.at("y").get<std::string>());
        return y.size() == 3 ? single_triangle(y) : delaunay_triangulate(y);
    };
    auto center = cfg.contains("center") ? parse_center(cfg.at("center").get<std::string>())
                                         : CenterSpec::mass_center();

    if (mode == "freq") {
        const Triangulation tri = load_y();
        const auto r_grid = grid_from_json(cfg.at("r"));
        std::vector<int> n_grid;
        for (const auto& v : cfg.at("n")) n_grid.push_back(v.get<int>());
        const auto table = gamma_frequency_experiment(tri, center, r_grid, n_grid,
                                                      pattern_from_json(cfg.value("pattern", json())),
                                                      n_mc, seed, threads);
        std::ostringstream os;
        os << "# " << stamp << " j_m=" << table.j_m
           << " monotonicity_violations=" << table.monotonicity_violations << "\n";
        os << "r,n,gamma,count\n";
        for (size_t ri = 0; ri < table.r_values.size(); ++ri)
            for (size_t ni = 0; ni < table.n_grid.size(); ++ni)
                for (size_t g = 0; g < table.counts[ri][ni].size(); ++g)
                    if (table.counts[ri][ni][g] > 0)
                        os << format_double(table.r_values[ri]) << "," << table.n_grid[ni] << ","
                           << g << "," << table.counts[ri][ni][g] << "\n";
        write_text(a.out_dir + "/freq_table.csv", os.str());
    } else if (mode == "size-power") {
        const Triangulation tri = load_y();
        SizePowerConfig sp;
        sp.center = center;
        sp.r_grid = grid_from_json(cfg.at("r"));
        sp.pattern = pattern_from_json(cfg.value("pattern", json()));
        sp.n = cfg.value("n", 1000);
        sp.n_mc = n_mc;
        sp.alpha = cfg.value("alpha", 0.05);
        sp.seed = seed;
        sp.threads = threads;
        const auto res = size_power_experiment(tri, sp);
        std::ostringstream os;
        os << "# " << stamp << " n=" << res.n << " j_m=" << res.j_m << " alpha=" << res.alpha
           << " pattern=" << pattern_name(sp.pattern.kind) << "\n";
        os << "r,p_r,binom_lower,binom_upper,norm_lower,norm_upper,se_norm_lower,"
              "class_lower,class_upper\n";
        for (const auto& row : res.rows)
            os << format_double(row.r) << "," << format_double(row.p_r) << ","
               << row.binom_lower << "," << row.binom_upper << "," << row.norm_lower << ","
               << row.norm_upper << ","
               << SizePowerResult::standard_error(row.norm_lower, res.n_mc) << ","
               << SizePowerResult::size_classification(row.norm_lower) << ","
               << SizePowerResult::size_classification(row.norm_upper) << "\n";
        write_text(a.out_dir + "/size_power.csv", os.str());
    } else if (mode == "pi-out") {
        PiOutConfig pc;
        if (cfg.contains("m_grid")) {
            pc.m_grid.clear();
            for (const auto& v : cfg.at("m_grid")) pc.m_grid.push_back(v.get<int>());
        }
        pc.n = cfg.value("n", 500);
        pc.n_mc = n_mc;
        pc.seed = seed;
        pc.threads = threads;
        const auto rows = pi_out_experiment(pc);
        std::ostringstream os;
        os << "# " << stamp << " n=" << pc.n << "\n";
        os << "m,pi_out,se,fitted\n";
        for (const auto& row : rows)
            os << row.m << "," << format_double(row.pi_out) << "," << format_double(row.se)
               << "," << format_double(row.fitted) << "\n";
        write_text(a.out_dir + "/pi_out.csv", os.str());
    } else if (mode == "gbar-hist") {
        const Triangulation tri = load_y();
        std::vector<int> n_grid;
        for (const auto& v : cfg.at("n")) n_grid.push_back(v.get<int>());
        PcdParams params{cfg.contains("r") ? Expansion(cfg.at("r").get<double>())
                                           : Expansion(1.5),
                         center};
        const auto hist = gbar_histogram(tri, params, n_grid, n_mc, seed,
                                         cfg.value("bins", 40), threads);
        std::ostringstream os;
        os << "# " << stamp << " r=" << format_double(params.r.value()) << "\n";
        os << "n,bin_lo,bin_hi,count\n";
        for (const auto& c : hist.cells)
            os << c.n << "," << format_double(c.lo) << "," << format_double(c.hi) << ","
               << c.count << "\n";
        write_text(a.out_dir + "/hist_gbar.csv", os.str());
    } else {
        fail(errc::invalid_argument, "mode must be freq, size-power, pi-out or gbar-hist");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Spatial segregation/association tests from the domination number of\n"
        "proportional-edge proximity catch digraphs over a Delaunay triangulation.\n"
        "Recommended expansion parameters: r around 1.30 against segregation,\n"
        "r around 1.35 against association. Values in (1.45, 1.50) are not\n"
        "recommended (severely liberal against segregation, conservative against\n"
        "association); use r = 1.5 exactly with the centroid center instead."};
    app.set_version_flag("--version", kVersion);
    app.set_help_all_flag("--help-all", "expanded help for every subcommand");
    app.require_subcommand(1);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Run a segregation/association test");
    test->add_option("--x", ta.x_path, "CSV of X points (class of interest)")->required();
    test->add_option("--y", ta.y_path, "CSV of Y points (reference class)")->required();
    test->add_option("--r", ta.r, "expansion parameter in [1, inf], or 'inf'");
    test->add_option("--center", ta.center, "mc | t1 | t2 | t3 | w1,w2,w3");
    test->add_option("--alpha", ta.alpha, "test level in (0, 0.5)");
    test->add_option("--alternative", ta.alternative, "segregation | association")
        ->check(CLI::IsMember({"segregation", "association"}));
    test->add_option("--statistic", ta.statistic, "normal | binomial")
        ->check(CLI::IsMember({"normal", "binomial"}));
    test->add_flag("--hull-correction", ta.hull_correction,
                   "apply the convex-hull correction C_ch");
    test->add_flag("--small-sample", ta.small_sample,
                   "apply the small-sample adjustment (r in {1.35, 1.5}, m in {10..50})");
    test->add_option("--out", ta.out, "output JSON path (default stdout)");
    test->add_option("--dump-triangulation", ta.dump_tri, "write the Y triangulation JSON");
    test->add_option("--rel-tol", ta.rel_tol, "p_r quadrature relative tolerance");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Sample a point pattern");
    gen->add_option("--pattern", ga.pattern, "csr | segregation | association")
        ->check(CLI::IsMember({"csr", "segregation", "association"}));
    double eps_opt, delta_opt;
    auto* eps_flag = gen->add_option("--epsilon", eps_opt, "alternative parameter in (0, sqrt(3)/3)");
    auto* delta_flag = gen->add_option("--delta", delta_opt,
                                       "area fraction (carved for segregation, support for "
                                       "association); converted to epsilon");
    gen->add_option("--n", ga.n, "number of points")->required();
    gen->add_option("--y", ga.y_path, "CSV of Y points")->required();
    gen->add_option("--seed", ga.seed, "RNG seed");
    gen->add_option("--out", ga.out, "output CSV path (default stdout)");

    double pc_from = 1.05, pc_to = 1.45, pc_step = 0.05, pc_tol = 1e-8;
    std::string pc_out;
    auto* curve = app.add_subcommand("pr-curve", "Tabulate p_r over an r grid");
    curve->add_option("--from", pc_from, "grid start (> 1)");
    curve->add_option("--to", pc_to, "grid end (<= 1.5)");
    curve->add_option("--step", pc_step, "grid step");
    curve->add_option("--rel-tol", pc_tol, "quadrature relative tolerance");
    curve->add_option("--out", pc_out, "output CSV path (default stdout)");

    SimArgs sa;
    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a config");
    sim->add_option("--config", sa.config_path, "JSON config")->required();
    sim->add_option("--out", sa.out_dir, "output directory")->required();
    sim->add_option("--threads", sa.threads_override, "worker threads (0 = all cores)");
    std::uint64_t seed_opt;
    auto* seed_flag = sim->add_option("--seed", seed_opt, "override the config seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*test) return run_test_cmd(ta);
        if (*gen) {
            if (*eps_flag) ga.epsilon = eps_opt;
            if (*delta_flag) ga.delta = delta_opt;
            return run_generate(ga);
        }
        if (*curve) return run_pr_curve(pc_from, pc_to, pc_step, pc_tol, pc_out);
        if (*sim) {
            if (*seed_flag) sa.seed_override = seed_opt;
            return run_simulate(sa);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
