#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optdesign/design.hpp"

namespace optdesign {

/// Observed responses grouped by node; counts must match the design's
/// frequencies.
class NodeSamples {
public:
    NodeSamples(Design design, std::vector<std::vector<double>> samples);

    const Design& design() const { return design_; }
    const std::vector<std::vector<double>>& samples() const { return samples_; }

private:
    Design design_;
    std::vector<std::vector<double>> samples_;
};

std::vector<double> node_means(const NodeSamples& s);

/// sum_j mean_j * l_j(x); unbiased for f(x) under the model.
double point_estimate(const NodeSamples& s, double x);

enum class VarianceMode { known, pooled, paper_pooled };

const char* variance_mode_name(VarianceMode m);

struct PooledVariance {
    double s2;
    int dof;
};

/// pooled: s2 = sum_j (n_j - 1) s_j^2 / (n - g) with unbiased per-node
/// variances, dof = n - g. paper_pooled keeps the n - g - 2 denominator in
/// both places and dof = g - 2.
PooledVariance pooled_variance(const NodeSamples& s, VarianceMode mode);

struct ConfidenceInterval {
    double center;
    double half_width;
    double level;
    VarianceMode mode;
    std::optional<int> dof;
};

ConfidenceInterval confidence_interval(const NodeSamples& s, double x, double level,
                                       VarianceMode mode,
                                       std::optional<double> sigma2_known = std::nullopt);

/// CSV with header "node_index,replicate_index,y".
NodeSamples samples_from_csv(const Design& design, const std::string& csv_text);

std::string to_json(const ConfidenceInterval& ci);

}  // namespace optdesign
