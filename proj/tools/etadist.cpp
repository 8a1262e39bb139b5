// Command-line front end. Every knob is a long option on the top-level app
// (subcommands fall through to it), so a key=value config file and the
// command line share one namespace; flags override the file.

#include "etadist/etadist.hpp"
#include "etadist/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <random>

using namespace etadist;

namespace {

struct Config {
    double sigma = 0.75;
    int m = 0;
    double alpha = 0;
    double tol = 1e-6;
    double extent = 4, step = 0.05;
    double x_min = -3, x_max = 3, x_step = 0.01;
    double tau = 2;
    double kappa = 0;
    double kappa_floor = 1e3;
    double min_kappa = 10;
    double y = 0; // 0: command default
    double y_cap = 1e4;
    double T = 1e6;
    double n_samples = 1e6;
    int k = 1, l = 1;
    double L = 0; // 0: (log T)^sigma (log log T)^m
    double c = -1, d = 1;
    double points = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool discrepancy = false;
    std::string out;
    std::string format = "json";
};

std::int64_t as_count(double v, const char* name)
{
    if (!(v >= 0) || v != std::floor(v) || v > 9e15)
        throw ParameterError(std::string(name) + " must be a non-negative integer");
    return std::int64_t(v);
}

ModelPoint model_point(const Config& c)
{
    ModelPoint mp{c.sigma, c.m, c.alpha};
    validate(mp);
    return mp;
}

json common_parameters(const Config& c)
{
    return json{{"sigma", c.sigma}, {"m", c.m}, {"alpha", c.alpha}, {"seed", c.seed}};
}

void emit_json(const Config& c, const json& doc)
{
    if (c.out.empty())
        std::cout << doc.dump(2) << "\n";
    else
        write_json(c.out, doc);
}

void emit(const Config& c, const json& meta, const json& result, const CsvTable* table)
{
    if (c.format == "csv") {
        if (!table)
            throw ParameterError("this command has no csv output");
        if (c.out.empty())
            throw ParameterError("csv output needs --out");
        write_csv(c.out, *table, meta);
        return;
    }
    emit_json(c, document(meta, result));
}

void run_density(const Config& c)
{
    auto mp = model_point(c);
    auto g = density_grid(mp, c.extent, c.step, c.tol);
    json params = common_parameters(c);
    params.update({{"extent", g.extent}, {"step", g.step}, {"tol", c.tol}});
    json budgets{{"normalization_residual", g.normalization_residual},
                 {"truncation_error", g.truncation_error},
                 {"min_raw", g.min_raw},
                 {"max_edge", g.max_edge},
                 {"inversion_radius", g.inversion_radius},
                 {"decay_threshold", g.decay_threshold},
                 {"cutoff_y", g.cutoff_y}};
    auto table = to_csv(g);
    emit(c, metadata("density", params, budgets), g, &table);
}

void run_marginal(const Config& c)
{
    auto mp = model_point(c);
    if (!(c.x_step > 0) || !(c.x_max > c.x_min))
        throw ParameterError("need x-step > 0 and x-max > x-min");
    std::vector<double> xs;
    auto count = std::size_t(std::floor((c.x_max - c.x_min) / c.x_step + 1e-9)) + 1;
    if (count > 1000000)
        throw CapacityError("more than 1e6 marginal points");
    for (std::size_t i = 0; i < count; ++i)
        xs.push_back(c.x_min + double(i) * c.x_step);
    auto md = marginal_density(mp, xs, c.tol);
    json params = common_parameters(c);
    params.update({{"x_min", c.x_min}, {"x_max", c.x_max}, {"x_step", c.x_step}, {"tol", c.tol}});
    auto table = to_csv(md);
    emit(c, metadata("marginal", params, json{{"tol", c.tol}}), md, &table);
}

void run_tail(const Config& c)
{
    auto mp = model_point(c);
    SaddleOptions opt;
    opt.min_kappa = c.min_kappa;
    auto s = tail_saddle(mp, c.tau, opt);
    json params = common_parameters(c);
    params.update({{"tau", c.tau}, {"min_kappa", c.min_kappa}});
    json budgets{{"error_scale", s.error_scale}, {"cumulant_error", s.cumulant_error}, {"cutoff_y", s.cutoff_y}};
    emit(c, metadata("tail", params, budgets), s, nullptr);
}

void run_saddle(const Config& c)
{
    auto mp = model_point(c);
    SaddleOptions opt;
    auto probe = solve_saddle(mp, c.tau, opt);
    double sd = std::sqrt(probe.f2);
    std::vector<double> xs;
    for (int i = -80; i <= 80; ++i)
        xs.push_back(0.05 * i * sd);
    auto td = tilted_density(mp, c.tau, xs, opt);
    json params = common_parameters(c);
    params["tau"] = c.tau;
    json budgets{{"cumulant_error", td.saddle.cumulant_error}};
    auto table = to_csv(td);
    emit(c, metadata("saddle", params, budgets), td, &table);
}

void run_empirical(const Config& c)
{
    auto mp = model_point(c);
    auto n = as_count(c.n_samples, "n-samples");
    SurrogateChoice sc;
    double y = c.y;
    if (y <= 0) {
        sc = surrogate_choice(mp, c.T, c.y_cap);
        y = sc.y;
    }
    auto table = restrict_table(*shared_table(), y);
    auto em = empirical_measure(mp, table, c.T, n);
    json params = common_parameters(c);
    params.update({{"T", c.T}, {"Y", y}, {"n_samples", n}});
    if (c.y <= 0)
        params["surrogate"] = sc;
    json budgets{{"note", "consecutive samples are correlated; no standard errors"}};
    if (c.discrepancy) {
        DensityOptions dopt;
        dopt.auto_extend = false;
        auto g = density_grid(mp, c.extent, c.step, c.tol, dopt);
        auto rf = default_rectangle_family(c.T);
        auto rep = discrepancy(em, g, rf);
        budgets["grid_normalization_residual"] = g.normalization_residual;
        emit_json(c, document(metadata("empirical", params, budgets), rep));
        return;
    }
    auto csv = to_csv(em);
    json result{{"mp", em.mp}, {"T", em.T}, {"cutoff_y", em.cutoff_y}, {"t_step", em.t_step}, {"samples", em.samples}};
    emit(c, metadata("empirical", params, budgets), result, &csv);
}

void run_moments(const Config& c)
{
    auto mp = model_point(c);
    double y = c.y > 0 ? c.y : 10;
    auto table = sieve(std::int64_t(y));
    cplx time_side = exact_time_moment(mp, table, c.k, c.l, c.T);
    cplx model_side = exact_mixed_moment(mp, table, c.k, c.l);
    double budget = std::pow(std::pow(2.0, mp.m) * y, 2 * (c.k + c.l)) / c.T;
    json params = common_parameters(c);
    params.update({{"k", c.k}, {"l", c.l}, {"Y", y}, {"T", c.T}});
    json result{{"time_average", time_side},
                {"model_moment", model_side},
                {"difference", std::abs(time_side - model_side)},
                {"budget", budget},
                {"within_budget", std::abs(time_side - model_side) <= budget}};
    emit(c, metadata("moments", params, json{{"budget", budget}}), result, nullptr);
}

void run_constants(const Config& c)
{
    auto mp = model_point(c);
    auto k = model_constants(mp.sigma, mp.m);
    json params = common_parameters(c);
    json result{{"constants", k}, {"g", gn_quadrature(mp.sigma, 4)}};
    json budgets = json::object();
    if (c.kappa > 0) {
        auto cv = cumulant(mp, c.kappa);
        result["cumulant"] = cv;
        result["cumulant_asymptotic"] = cumulant_asymptotic(mp, 0, c.kappa, c.kappa_floor);
        params.update({{"kappa", c.kappa}, {"kappa_floor", c.kappa_floor}});
        budgets["cumulant_error"] = cv.error_estimate;
    }
    emit(c, metadata("constants", params, budgets), result, nullptr);
}

void run_selberg(const Config& c)
{
    double L = c.L > 0 ? c.L : bs_scale(model_point(c), c.T);
    BSParams bs{L, c.c, c.d};
    validate(bs);
    auto n = as_count(c.points, "points");
    std::mt19937_64 rng(c.seed);
    double span = c.d - c.c;
    std::uniform_real_distribution<double> u(c.c - span, c.d + span);
    std::size_t violations = 0;
    double worst_ratio = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        double x = u(rng);
        double err = std::abs(smoothed_indicator(x, bs) - (x > c.c && x < c.d ? 1.0 : 0.0));
        double bound = 2 * (bs_K(L * (x - c.c)) + bs_K(L * (x - c.d)));
        violations += err > bound;
        worst_ratio = std::max(worst_ratio, err / bound);
    }
    json params{{"L", L}, {"c", c.c}, {"d", c.d}, {"points", n}, {"seed", c.seed}};
    json result{{"violations", violations}, {"worst_error_over_bound", worst_ratio}};
    emit(c, metadata("selberg-check", params, json::object()), result, nullptr);
}

int fail(const Error& e)
{
    std::cerr << error_document(e).dump() << "\n";
    return e.exit_code();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Value distribution of the random model for log zeta and its derivatives"};
    app.set_version_flag("--version", std::string(version));
    app.set_config("--config", "", "key=value file; command-line flags override it");
    app.fallthrough();
    app.require_subcommand(1);
    Config c;

    app.add_option("--sigma", c.sigma, "real part sigma");
    app.add_option("--m", c.m, "derivative order m >= 0");
    app.add_option("--alpha", c.alpha, "projection angle");
    app.add_option("--tol", c.tol, "target accuracy");
    app.add_option("--extent", c.extent, "density grid half-width");
    app.add_option("--step", c.step, "density grid spacing");
    app.add_option("--x-min", c.x_min);
    app.add_option("--x-max", c.x_max);
    app.add_option("--x-step", c.x_step);
    app.add_option("--tau", c.tau, "tail level");
    app.add_option("--kappa", c.kappa, "evaluate the cumulant here (constants)");
    app.add_option("--kappa-floor", c.kappa_floor, "smallest kappa for the asymptotic formula");
    app.add_option("--min-kappa", c.min_kappa, "smallest saddle point accepted by tail");
    app.add_option("--Y", c.y, "Dirichlet polynomial cutoff (0: default)");
    app.add_option("--y-cap", c.y_cap, "cap on the default cutoff");
    app.add_option("--T", c.T, "height T; t runs over [T, 2T]");
    app.add_option("--n-samples", c.n_samples, "number of t-grid steps");
    app.add_option("--k", c.k);
    app.add_option("--l", c.l);
    app.add_option("--L", c.L, "smoothing scale (0: from T)");
    app.add_option("--c", c.c, "interval left end");
    app.add_option("--d", c.d, "interval right end");
    app.add_option("--points", c.points, "number of random test points");
    app.add_option("--seed", c.seed, "seed for all randomness");
    app.add_option("--threads", c.threads, "worker threads (0: all cores)");
    app.add_flag("--discrepancy", c.discrepancy, "empirical: report the rectangle discrepancy");
    app.add_option("--out", c.out, "output path (json defaults to stdout)");
    app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    struct Command {
        const char* name;
        const char* help;
        void (*run)(const Config&);
    };
    const Command commands[] = {
        {"density", "two-dimensional density grid", run_density},
        {"marginal", "density of Re(e^{-i alpha} eta) on a line", run_marginal},
        {"tail", "saddle-point tail probability", run_tail},
        {"saddle", "saddle point and tilted density", run_saddle},
        {"empirical", "samples of the Dirichlet polynomial on [T, 2T]", run_empirical},
        {"moments", "time-averaged vs model mixed moments", run_moments},
        {"constants", "g_n, A, A_m, C_m and optionally the cumulant", run_constants},
        {"selberg-check", "smoothed indicator error against its bound", run_selberg},
    };
    for (const auto& cmd : commands)
        app.add_subcommand(cmd.name, cmd.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(ParameterError(e.what()));
    }

    try {
        set_thread_count(c.threads);
        for (const auto& cmd : commands)
            if (app.got_subcommand(cmd.name))
                cmd.run(c);
    } catch (const Error& e) {
        return fail(e);
    } catch (const json::exception& e) {
        return fail(InternalError(e.what()));
    } catch (const std::exception& e) {
        return fail(InternalError(e.what()));
    }
    return 0;
}
