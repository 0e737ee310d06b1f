#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optdesign/bivariate.hpp"
#include "optdesign/design.hpp"
#include "optdesign/inference.hpp"
#include "optdesign/simulate.hpp"
#include "optdesign/variance.hpp"

namespace {

using namespace optdesign;

std::vector<double> parse_reals(const std::string& text, std::size_t expected,
                                const std::string& what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
            throw CLI::ValidationError(what, "'" + cell + "' is not a number");
        out.push_back(v);
    }
    if (expected != 0 && out.size() != expected)
        throw CLI::ValidationError(what, "expected " + std::to_string(expected) +
                                             " comma-separated numbers");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::parse_error, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(errc::parse_error, "cannot open '" + out_path + "' for writing");
    out << payload;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct GArg {
    int g = 0;
    int degree = -1;

    int resolve() const {
        if (g > 0 && degree >= 0)
            throw CLI::ValidationError("--g", "give either --g or --degree, not both");
        if (degree >= 0) return degree + 1;
        if (g > 0) return g;
        throw CLI::ValidationError("--g", "one of --g or --degree is required");
    }
};

void add_g_options(CLI::App* cmd, GArg& arg) {
    cmd->add_option("--g", arg.g, "number of nodes (polynomial degree + 1)");
    cmd->add_option("--degree", arg.degree, "polynomial degree, alias for g - 1");
}

int run(int argc, char** argv) {
    CLI::App app{"minimax interpolation/extrapolation designs for polynomial regression"};
    app.require_subcommand(1);

    // ---- design ----------------------------------------------------------
    auto* design_cmd = app.add_subcommand("design", "construct a design");
    design_cmd->require_subcommand(1);
    GArg d_g;
    int d_n = 0;
    std::string d_interval = "-1,1";
    double d_target = 0.0;
    std::string d_out;

    auto* hl = design_cmd->add_subcommand("hoel-levine", "extrapolation design");
    add_g_options(hl, d_g);
    hl->add_option("--n", d_n, "total budget")->required();
    hl->add_option("--interval", d_interval, "design interval a,b (default -1,1)");
    hl->add_option("--target", d_target, "extrapolation point, strictly outside the interval")
        ->required();
    hl->add_option("--out", d_out, "output file (default stdout)");

    auto* guest = design_cmd->add_subcommand("guest", "interpolation minimax design");
    add_g_options(guest, d_g);
    guest->add_option("--n", d_n, "total budget")->required();
    guest->add_option("--interval", d_interval, "design interval a,b (default -1,1)");
    guest->add_option("--out", d_out, "output file (default stdout)");

    // ---- variance --------------------------------------------------------
    auto* var_cmd = app.add_subcommand("variance", "variance profile of a design");
    std::string v_in, v_interval, v_out;
    double v_sigma2 = 1.0;
    int v_points = 101;
    double v_at = 0.0;
    bool v_weights = false;
    var_cmd->add_option("--in", v_in, "design JSON file")->required();
    var_cmd->add_option("--sigma2", v_sigma2, "noise variance (default 1)");
    var_cmd->add_option("--interval", v_interval, "profile interval a,b (default: design interval)");
    auto* points_opt = var_cmd->add_option("--points", v_points, "grid size (default 101)");
    auto* at_opt = var_cmd->add_option("--at", v_at, "evaluate at a single point instead");
    at_opt->excludes(points_opt);
    var_cmd->add_flag("--weights", v_weights, "use continuous weights instead of frequencies");
    var_cmd->add_option("--out", v_out, "output file (default stdout)");

    // ---- crossover -------------------------------------------------------
    auto* cross_cmd = app.add_subcommand("crossover", "Hoel-Levine/Guest crossover radius");
    GArg c_g;
    std::string c_out;
    add_g_options(cross_cmd, c_g);
    cross_cmd->add_option("--out", c_out, "output file (default stdout)");

    // ---- confidence ------------------------------------------------------
    auto* conf_cmd = app.add_subcommand("confidence", "confidence interval from samples");
    std::string cf_design, cf_samples, cf_mode = "pooled", cf_out;
    double cf_x = 0.0, cf_level = 0.95;
    double cf_sigma2 = 1.0;
    conf_cmd->add_option("--design", cf_design, "design JSON file")->required();
    conf_cmd->add_option("--samples", cf_samples, "samples CSV file")->required();
    conf_cmd->add_option("--x", cf_x, "evaluation point")->required();
    conf_cmd->add_option("--level", cf_level, "confidence level (default 0.95)");
    conf_cmd->add_option("--mode", cf_mode, "known | pooled | paper-pooled (default pooled)")
        ->check(CLI::IsMember({"known", "pooled", "paper-pooled"}));
    auto* cf_sigma_opt = conf_cmd->add_option("--sigma2", cf_sigma2, "noise variance (known mode)");
    conf_cmd->add_option("--out", cf_out, "output file (default stdout)");

    // ---- simulate --------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo verification of a design");
    std::vector<std::string> s_designs;
    std::string s_coeffs, s_noise = "gaussian", s_dump, s_out;
    double s_sigma = 1.0, s_x = 0.0;
    long s_reps = 10000;
    std::uint64_t s_seed = 0;
    double s_level = 0.0;
    sim_cmd->add_option("--design", s_designs, "design JSON file (repeat to compare)")
        ->required();
    sim_cmd->add_option("--coeffs", s_coeffs, "polynomial coefficients c0,c1,...")->required();
    sim_cmd->add_option("--noise", s_noise, "gaussian | gumbel | logistic (default gaussian)")
        ->check(CLI::IsMember({"gaussian", "gumbel", "gumbel_weibull", "logistic"}));
    sim_cmd->add_option("--sigma", s_sigma, "noise scale (default 1)");
    sim_cmd->add_option("--x", s_x, "evaluation point")->required();
    sim_cmd->add_option("--replications", s_reps, "replication count (default 10000)");
    auto* level_opt = sim_cmd->add_option("--level", s_level, "also report interval coverage");
    sim_cmd->add_option("--seed", s_seed, "RNG seed (default 0)");
    auto* dump_opt =
        sim_cmd->add_option("--dump", s_dump, "CSV of per-replication estimates");
    sim_cmd->add_option("--out", s_out, "output file (default stdout)");

    // ---- bivariate -------------------------------------------------------
    auto* biv_cmd = app.add_subcommand("bivariate", "tensor-product design on a stress rectangle");
    int b_g1 = 0, b_g2 = 0, b_m1 = 0, b_omega_n = 0;
    std::string b_rect, b_u, b_out;
    double b_alpha = 1.0, b_beta = 0.0;
    long b_reps = 1000000;
    std::uint64_t b_seed = 0;
    auto* bg1 = biv_cmd->add_option("--g1", b_g1, "nodes on the x axis");
    auto* bg2 = biv_cmd->add_option("--g2", b_g2, "nodes on the y axis");
    auto* bm1 = biv_cmd->add_option("--m1", b_m1, "total budget M1");
    auto* brect = biv_cmd->add_option("--rect", b_rect, "stress rectangle a1,b1,a2,b2");
    auto* bu = biv_cmd->add_option("--u", b_u, "unstressed point x,y");
    biv_cmd->add_option("--alpha", b_alpha, "variance-law alpha (default 1)");
    biv_cmd->add_option("--beta", b_beta, "variance-law beta (default 0)");
    auto* bomega = biv_cmd->add_option("--gumbel-omega", b_omega_n,
                                       "emit the order-statistics covariance for n draws");
    biv_cmd->add_option("--replicates", b_reps, "Monte Carlo replicates (default 1e6)");
    biv_cmd->add_option("--seed", b_seed, "RNG seed (default 0)");
    biv_cmd->add_option("--out", b_out, "output file (default stdout)");
    bomega->excludes(bg1, bg2, bm1, brect, bu);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    if (*hl || *guest) {
        const std::vector<double> iv = parse_reals(d_interval, 2, "--interval");
        DesignRequest req{d_g.resolve(), d_n, Interval(iv[0], iv[1]), std::nullopt};
        Design d = *hl ? (req.target = d_target, hoel_levine_design(req)) : guest_design(req);
        write_output(d_out, to_json(d) + "\n");
    } else if (*var_cmd) {
        const Design d = design_from_json(read_file(v_in));
        const Interval iv = v_interval.empty()
                                ? d.nodes.interval()
                                : [&] {
                                      const auto p = parse_reals(v_interval, 2, "--interval");
                                      return Interval(p[0], p[1]);
                                  }();
        if (at_opt->count() > 0) {
            const double var = variance_at(d, v_sigma2, v_at, v_weights);
            write_output(v_out, "{\"x\":" + format_real(v_at) + ",\"variance\":" +
                                    format_real(var) + "}\n");
        } else {
            const VarianceProfile p = variance_profile(d, v_sigma2, iv, v_points, v_weights);
            write_output(v_out, profile_to_csv(p));
        }
    } else if (*cross_cmd) {
        write_output(c_out, to_json(crossover_c1(c_g.resolve())) + "\n");
    } else if (*conf_cmd) {
        const Design d = design_from_json(read_file(cf_design));
        const NodeSamples samples = samples_from_csv(d, read_file(cf_samples));
        VarianceMode mode = VarianceMode::pooled;
        std::optional<double> sigma2;
        if (cf_mode == "known") {
            if (cf_sigma_opt->count() == 0)
                throw CLI::ValidationError("--sigma2", "known mode needs --sigma2");
            mode = VarianceMode::known;
            sigma2 = cf_sigma2;
        } else if (cf_mode == "paper-pooled") {
            mode = VarianceMode::paper_pooled;
        }
        write_output(cf_out, to_json(confidence_interval(samples, cf_x, cf_level, mode, sigma2)) +
                                 "\n");
    } else if (*sim_cmd) {
        PolynomialModel model;
        model.coefficients = parse_reals(s_coeffs, 0, "--coeffs");
        if (model.coefficients.empty())
            throw CLI::ValidationError("--coeffs", "needs at least one coefficient");
        model.noise = noise_family_from_name(s_noise);
        model.sigma = s_sigma;
        std::vector<Design> designs;
        for (const std::string& path : s_designs)
            designs.push_back(design_from_json(read_file(path)));
        std::optional<double> level;
        if (level_opt->count() > 0) level = s_level;
        if (designs.size() > 1 && level)
            throw CLI::ValidationError("--level", "coverage is reported for a single design");
        if (designs.size() > 1 && dump_opt->count() > 0)
            throw CLI::ValidationError("--dump", "dumping needs a single design");

        std::string payload;
        if (designs.size() == 1) {
            std::vector<double> estimates;
            const SimulationReport r =
                run_experiment(model, designs[0], s_x, s_reps, level, s_seed,
                               dump_opt->count() > 0 ? &estimates : nullptr);
            payload = to_json(r) + "\n";
            if (dump_opt->count() > 0) {
                std::string csv = "replicate,estimate\n";
                for (std::size_t i = 0; i < estimates.size(); ++i)
                    csv += std::to_string(i) + "," + format_real(estimates[i]) + "\n";
                write_output(s_dump, csv);
            }
        } else {
            for (const SimulationReport& r :
                 compare_designs(model, designs, s_x, s_reps, s_seed))
                payload += to_json(r) + "\n";
        }
        write_output(s_out, payload);
    } else if (*biv_cmd) {
        if (bomega->count() > 0) {
            const OrderStatistics os = gumbel_order_stat_covariance(b_omega_n, b_reps, b_seed);
            write_output(b_out, omega_to_csv(os.covariance));
        } else {
            if (bg1->count() == 0 || bg2->count() == 0 || bm1->count() == 0 ||
                brect->count() == 0 || bu->count() == 0)
                throw CLI::ValidationError(
                    "bivariate", "needs --g1, --g2, --m1, --rect and --u (or --gumbel-omega)");
            const auto rect = parse_reals(b_rect, 4, "--rect");
            const auto u = parse_reals(b_u, 2, "--u");
            const StressRectangle s{Interval(rect[0], rect[1]), Interval(rect[2], rect[3])};
            const BivariateDesign d =
                bivariate_design({u[0], u[1]}, s, b_g1, b_g2, b_m1, b_alpha, b_beta);
            write_output(b_out, to_json(d) + "\n");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const optdesign::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
