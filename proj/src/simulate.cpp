#include "optdesign/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <span>
#include <thread>

#include "optdesign/variance.hpp"

namespace optdesign {

namespace {

constexpr double kEulerGamma = 0.57721566490153287;
constexpr double kPi = 3.14159265358979324;

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

int worker_count(long replications) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    long threads = std::min<long>(hw, 8);
    if (const char* cap = std::getenv("OPTDESIGN_THREADS")) {
        const long limit = std::strtol(cap, nullptr, 10);
        if (limit >= 1) threads = std::min(threads, limit);
    }
    threads = std::min(threads, replications / 1024 + 1);
    return static_cast<int>(std::max<long>(threads, 1));
}

}  // namespace

const char* noise_family_name(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::gumbel_weibull: return "gumbel_weibull";
        case NoiseFamily::logistic: return "logistic";
    }
    return "gaussian";
}

NoiseFamily noise_family_from_name(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "gumbel_weibull" || name == "gumbel") return NoiseFamily::gumbel_weibull;
    if (name == "logistic") return NoiseFamily::logistic;
    fail(errc::parse_error, "unknown noise family '" + name + "'");
}

double PolynomialModel::eval(double x) const {
    double v = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) v = v * x + coefficients[i];
    return v;
}

double PolynomialModel::noise_variance() const {
    switch (noise) {
        case NoiseFamily::gaussian: return sigma * sigma;
        case NoiseFamily::gumbel_weibull: return sigma * sigma * kPi * kPi / 6.0;
        case NoiseFamily::logistic: return sigma * sigma * kPi * kPi / 3.0;
    }
    return sigma * sigma;
}

double draw_noise(NoiseFamily family, double sigma, CounterRng& rng) {
    switch (family) {
        case NoiseFamily::gaussian:
            return sigma * rng.normal();
        case NoiseFamily::gumbel_weibull: {
            // Z = ln(-ln(1-U)) has CDF 1 - exp(-exp(z)) and mean -gamma.
            const double u = rng.uniform();
            return sigma * (std::log(-std::log1p(-u)) + kEulerGamma);
        }
        case NoiseFamily::logistic: {
            const double u = rng.uniform();
            return sigma * std::log(u / (1.0 - u));
        }
    }
    return 0.0;
}

std::vector<double> sample_noise(NoiseFamily family, double sigma, int count, CounterRng& rng) {
    if (count < 1) fail(errc::invalid_request, "sample_noise needs count >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& v : out) v = draw_noise(family, sigma, rng);
    return out;
}

SimulationReport run_experiment(const PolynomialModel& model, const Design& d, double x_eval,
                                long replications, std::optional<double> level,
                                std::uint64_t seed, std::vector<double>* estimates_out) {
    if (replications < 100) fail(errc::invalid_request, "run_experiment needs >= 100 replications");
    if (level && !(*level > 0.0 && *level < 1.0))
        fail(errc::invalid_request, "confidence level must lie in (0,1)");

    const double theoretical = variance_at(d, model.noise_variance(), x_eval);

    const std::size_t g = d.size();
    LagrangeBasis basis(d.nodes);
    const std::vector<double> l = basis.eval(x_eval);
    std::vector<double> truth(g);
    for (std::size_t j = 0; j < g; ++j) truth[j] = model.eval(d.nodes[j]);
    const double f_true = model.eval(x_eval);

    std::vector<double> estimates(static_cast<std::size_t>(replications));
    const auto simulate_range = [&](long first, long last) {
        for (long r = first; r < last; ++r) {
            CounterRng rng(seed, static_cast<std::uint64_t>(r));
            double est = 0.0;
            for (std::size_t j = 0; j < g; ++j) {
                const int nj = d.frequencies[j];
                double sum = 0.0;
                for (int k = 0; k < nj; ++k)
                    sum += truth[j] + draw_noise(model.noise, model.sigma, rng);
                est += l[j] * sum / nj;
            }
            estimates[static_cast<std::size_t>(r)] = est;
        }
    };

    const int workers = worker_count(replications);
    if (workers == 1) {
        simulate_range(0, replications);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (replications + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long first = w * chunk;
            const long last = std::min(replications, first + chunk);
            if (first >= last) break;
            pool.emplace_back(simulate_range, first, last);
        }
        for (auto& t : pool) t.join();
    }

    const double mean = pairwise_sum(estimates) / static_cast<double>(replications);
    std::vector<double> sq(estimates.size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double dlt = estimates[i] - mean;
        sq[i] = dlt * dlt;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(replications - 1);

    SimulationReport report;
    report.replications = replications;
    report.eval_point = x_eval;
    report.empirical_mean = mean;
    report.empirical_variance = var;
    report.theoretical_variance = theoretical;
    report.variance_ratio =
        (theoretical == 0.0 && var == 0.0) ? 1.0 : var / theoretical;
    report.seed = seed;

    if (level) {
        const double half =
            normal_quantile(0.5 * (1.0 + *level)) * std::sqrt(theoretical);
        long hits = 0;
        for (double est : estimates)
            if (std::abs(est - f_true) <= half) ++hits;
        report.coverage = static_cast<double>(hits) / static_cast<double>(replications);
    }

    if (estimates_out) *estimates_out = std::move(estimates);
    return report;
}

std::vector<SimulationReport> compare_designs(const PolynomialModel& model,
                                              const std::vector<Design>& designs, double x_eval,
                                              long replications, std::uint64_t seed) {
    std::vector<SimulationReport> reports;
    reports.reserve(designs.size());
    for (const Design& d : designs)
        reports.push_back(run_experiment(model, d, x_eval, replications, std::nullopt, seed));
    return reports;
}

std::string to_json(const SimulationReport& r) {
    char buf[64];
    std::string out = "{\"replications\":";
    out += std::to_string(r.replications);
    const auto real = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out += ",\"eval_point\":" + real(r.eval_point);
    out += ",\"empirical_mean\":" + real(r.empirical_mean);
    out += ",\"empirical_variance\":" + real(r.empirical_variance);
    out += ",\"theoretical_variance\":" + real(r.theoretical_variance);
    out += ",\"variance_ratio\":" + real(r.variance_ratio);
    if (r.coverage) out += ",\"coverage\":" + real(*r.coverage);
    out += ",\"seed\":" + std::to_string(r.seed);
    out += '}';
    return out;
}

}  // namespace optdesign
