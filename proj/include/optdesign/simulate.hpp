#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optdesign/design.hpp"
#include "optdesign/rng.hpp"

namespace optdesign {

enum class NoiseFamily { gaussian, gumbel_weibull, logistic };

const char* noise_family_name(NoiseFamily f);
NoiseFamily noise_family_from_name(const std::string& name);

/// Polynomial truth plus a centered location-scale noise: eps = sigma * (Z - E(Z)).
struct PolynomialModel {
    std::vector<double> coefficients;  // theta_0 .. theta_{g-1}
    NoiseFamily noise = NoiseFamily::gaussian;
    double sigma = 1.0;

    double eval(double x) const;
    /// Variance of the centered noise: sigma^2 times {1, pi^2/6, pi^2/3}.
    double noise_variance() const;
};

/// One centered draw from the family.
double draw_noise(NoiseFamily family, double sigma, CounterRng& rng);

std::vector<double> sample_noise(NoiseFamily family, double sigma, int count, CounterRng& rng);

struct SimulationReport {
    long replications;
    double eval_point;
    double empirical_mean;
    double empirical_variance;
    double theoretical_variance;
    double variance_ratio;
    std::optional<double> coverage;
    std::uint64_t seed;
};

/// Simulate the design, estimate f(x_eval) per replication, and compare the
/// empirical moments with the analytic variance. Replication r draws from the
/// substream (seed, r), so results are byte-identical for a fixed seed at any
/// thread count. level, when given, adds known-sigma interval coverage.
SimulationReport run_experiment(const PolynomialModel& model, const Design& d, double x_eval,
                                long replications, std::optional<double> level,
                                std::uint64_t seed,
                                std::vector<double>* estimates_out = nullptr);

/// run_experiment per design under common random numbers (replication r uses
/// the same substream for every design).
std::vector<SimulationReport> compare_designs(const PolynomialModel& model,
                                              const std::vector<Design>& designs, double x_eval,
                                              long replications, std::uint64_t seed);

std::string to_json(const SimulationReport& r);

}  // namespace optdesign
