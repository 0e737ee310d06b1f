#include "optdesign/inference.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "optdesign/stats.hpp"

namespace optdesign {

NodeSamples::NodeSamples(Design design, std::vector<std::vector<double>> samples)
    : design_(std::move(design)), samples_(std::move(samples)) {
    if (samples_.size() != design_.size())
        fail(errc::insufficient_data, "sample groups must match the design's node count");
    for (std::size_t j = 0; j < samples_.size(); ++j) {
        if (samples_[j].empty())
            fail(errc::insufficient_data, "node " + std::to_string(j) + " has no observations");
        if (static_cast<int>(samples_[j].size()) != design_.frequencies[j])
            fail(errc::insufficient_data,
                 "node " + std::to_string(j) + " has " + std::to_string(samples_[j].size()) +
                     " observations, design allocates " +
                     std::to_string(design_.frequencies[j]));
    }
}

std::vector<double> node_means(const NodeSamples& s) {
    std::vector<double> means(s.samples().size());
    for (std::size_t j = 0; j < means.size(); ++j) {
        double sum = 0.0;
        for (double y : s.samples()[j]) sum += y;
        means[j] = sum / static_cast<double>(s.samples()[j].size());
    }
    return means;
}

double point_estimate(const NodeSamples& s, double x) {
    const std::vector<double> means = node_means(s);
    LagrangeBasis basis(s.design().nodes);
    const std::vector<double> l = basis.eval(x);
    double est = 0.0;
    for (std::size_t j = 0; j < means.size(); ++j) est += means[j] * l[j];
    return est;
}

const char* variance_mode_name(VarianceMode m) {
    switch (m) {
        case VarianceMode::known: return "known";
        case VarianceMode::pooled: return "pooled";
        case VarianceMode::paper_pooled: return "paper_pooled";
    }
    return "known";
}

PooledVariance pooled_variance(const NodeSamples& s, VarianceMode mode) {
    if (mode == VarianceMode::known)
        fail(errc::invalid_request, "pooled_variance needs an estimating mode");
    const int g = static_cast<int>(s.design().size());
    const int n = s.design().n;

    std::vector<double> ss(static_cast<std::size_t>(g));  // per-node sum of squares
    for (std::size_t j = 0; j < ss.size(); ++j) {
        const auto& ys = s.samples()[j];
        if (ys.size() < 2)
            fail(errc::insufficient_replication,
                 "node " + std::to_string(j) + " needs at least 2 replicates");
        double mean = 0.0;
        for (double y : ys) mean += y;
        mean /= static_cast<double>(ys.size());
        double acc = 0.0;
        for (double y : ys) acc += (y - mean) * (y - mean);
        ss[j] = acc;
    }

    if (mode == VarianceMode::pooled) {
        if (n - g <= 0) fail(errc::non_positive_dof, "pooled variance needs n > g");
        double num = 0.0;
        for (double v : ss) num += v;  // sum_j (n_j - 1) s_j^2 with s_j^2 = ss_j/(n_j - 1)
        return {num / (n - g), n - g};
    }

    // paper_pooled: n - g - 2 in both denominators, Student dof g - 2
    const int denom = n - g - 2;
    if (denom <= 0) fail(errc::non_positive_dof, "paper pooling needs n > g + 2");
    if (g - 2 < 1) fail(errc::non_positive_dof, "paper pooling needs g > 2 for the dof");
    double num = 0.0;
    for (std::size_t j = 0; j < ss.size(); ++j) {
        const double nj = static_cast<double>(s.samples()[j].size());
        num += (nj - 1.0) * (ss[j] / denom);
    }
    return {num / denom, g - 2};
}

ConfidenceInterval confidence_interval(const NodeSamples& s, double x, double level,
                                       VarianceMode mode,
                                       std::optional<double> sigma2_known) {
    if (!(level > 0.0 && level < 1.0))
        fail(errc::invalid_request, "confidence level must lie in (0,1)");

    const double center = point_estimate(s, x);
    LagrangeBasis basis(s.design().nodes);
    const std::vector<double> l = basis.eval(x);
    double factor = 0.0;
    for (std::size_t j = 0; j < l.size(); ++j)
        factor += l[j] * l[j] / static_cast<double>(s.design().frequencies[j]);

    const double p = 0.5 * (1.0 + level);
    if (mode == VarianceMode::known) {
        if (!sigma2_known) fail(errc::invalid_request, "known mode needs sigma2");
        if (*sigma2_known < 0.0) fail(errc::invalid_request, "sigma2 must be non-negative");
        const double half = normal_quantile(p) * std::sqrt(*sigma2_known * factor);
        return {center, half, level, mode, std::nullopt};
    }
    const PooledVariance pv = pooled_variance(s, mode);
    const double half = student_quantile(p, pv.dof) * std::sqrt(pv.s2 * factor);
    return {center, half, level, mode, pv.dof};
}

NodeSamples samples_from_csv(const Design& design, const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line != "node_index,replicate_index,y")
        fail(errc::parse_error, "samples CSV must start with 'node_index,replicate_index,y'");

    std::vector<std::vector<double>> groups(design.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t c1 = line.find(',');
        std::size_t c2 = (c1 == std::string::npos) ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            fail(errc::parse_error, "samples CSV line " + std::to_string(lineno) +
                                        " needs three comma-separated fields");
        std::size_t pos = 0;
        int node = 0;
        try {
            node = std::stoi(line.substr(0, c1), &pos);
        } catch (...) {
            fail(errc::parse_error, "bad node index on line " + std::to_string(lineno));
        }
        if (pos != c1 || node < 0 || node >= static_cast<int>(design.size()))
            fail(errc::parse_error, "bad node index on line " + std::to_string(lineno));
        char* end = nullptr;
        const std::string ytext = line.substr(c2 + 1);
        const double y = std::strtod(ytext.c_str(), &end);
        if (end == ytext.c_str() || *end != '\0')
            fail(errc::parse_error, "bad response value on line " + std::to_string(lineno));
        groups[static_cast<std::size_t>(node)].push_back(y);
    }
    return NodeSamples(design, std::move(groups));
}

std::string to_json(const ConfidenceInterval& ci) {
    char buf[64];
    std::string out = "{\"center\":";
    std::snprintf(buf, sizeof(buf), "%.17g", ci.center);
    out += buf;
    out += ",\"half_width\":";
    std::snprintf(buf, sizeof(buf), "%.17g", ci.half_width);
    out += buf;
    out += ",\"level\":";
    std::snprintf(buf, sizeof(buf), "%.17g", ci.level);
    out += buf;
    out += ",\"variance_mode\":\"";
    out += variance_mode_name(ci.mode);
    out += '"';
    if (ci.dof) {
        out += ",\"dof\":";
        out += std::to_string(*ci.dof);
    }
    out += '}';
    return out;
}

}  // namespace optdesign
