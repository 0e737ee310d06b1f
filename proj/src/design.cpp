#include "optdesign/design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

namespace optdesign {

const char* design_kind_name(DesignKind k) {
    switch (k) {
        case DesignKind::hoel_levine: return "hoel_levine";
        case DesignKind::guest: return "guest";
        case DesignKind::custom: return "custom";
    }
    return "custom";
}

DesignKind design_kind_from_name(const std::string& name) {
    if (name == "hoel_levine") return DesignKind::hoel_levine;
    if (name == "guest") return DesignKind::guest;
    if (name == "custom") return DesignKind::custom;
    fail(errc::parse_error, "unknown design kind '" + name + "'");
}

void DesignRequest::validate() const {
    if (g < 2) fail(errc::invalid_request, "g must be at least 2");
    if (n < g) fail(errc::invalid_request, "budget n must be at least g");
    if (target && interval.contains(*target))
        fail(errc::not_extrapolation,
             "target must lie strictly outside the design interval; the interior problem "
             "is degenerate");
}

NodeSet chebyshev_nodes(int g) {
    if (g < 2) fail(errc::invalid_request, "chebyshev_nodes needs g >= 2");
    std::vector<double> nodes(static_cast<std::size_t>(g));
    const int d = g - 1;
    nodes[0] = -1.0;
    nodes[static_cast<std::size_t>(d)] = 1.0;
    for (int i = 1; 2 * i < d; ++i) {
        // node i (from the left) is cos((d-i) pi / d); mirror for exact antisymmetry
        const double v = std::cos(static_cast<double>(d - i) * M_PI / d);
        nodes[static_cast<std::size_t>(i)] = v;
        nodes[static_cast<std::size_t>(d - i)] = -v;
    }
    if (d % 2 == 0 && d >= 2) nodes[static_cast<std::size_t>(d / 2)] = 0.0;
    return NodeSet(std::move(nodes), Interval::unit());
}

std::vector<int> round_frequencies(const std::vector<double>& weights, int n) {
    const std::size_t g = weights.size();
    for (double w : weights)
        if (w < 0.0) fail(errc::invalid_request, "weights must be non-negative");
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - n) > 1e-9 * std::max(1.0, std::abs(static_cast<double>(n))))
        fail(errc::invalid_request, "weights must sum to the budget n");

    std::vector<int> freq(g);
    std::vector<std::pair<double, std::size_t>> frac(g);
    int assigned = 0;
    for (std::size_t j = 0; j < g; ++j) {
        const double f = std::floor(weights[j]);
        freq[j] = static_cast<int>(f);
        assigned += freq[j];
        frac[j] = {weights[j] - f, j};
    }
    int remaining = n - assigned;
    std::stable_sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int u = 0; u < remaining && u < static_cast<int>(g); ++u)
        freq[frac[static_cast<std::size_t>(u)].second] += 1;
    return freq;
}

namespace {

// A node with 0 observations makes the estimator variance infinite, so any
// zero after rounding takes a unit from the currently largest frequency.
void lift_zero_frequencies(std::vector<int>& freq) {
    for (std::size_t j = 0; j < freq.size(); ++j) {
        while (freq[j] == 0) {
            auto donor = std::max_element(freq.begin(), freq.end());
            if (*donor <= 1) fail(errc::invalid_request, "budget too small to cover every node");
            *donor -= 1;
            freq[j] += 1;
        }
    }
}

std::vector<double> mapped_nodes(const NodeSet& unit_nodes, const Interval& iv) {
    std::vector<double> out(unit_nodes.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = from_unit(iv, unit_nodes[i]);
    return out;
}

void validate_design(const Design& d) {
    const std::size_t g = d.nodes.size();
    if (d.weights.size() != g || d.frequencies.size() != g)
        fail(errc::invalid_request, "nodes, weights and frequencies must have equal length");
    if (d.n <= 0) fail(errc::invalid_request, "budget n must be positive");
    double wsum = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
    if (std::abs(wsum - d.n) > 1e-9 * std::max(1.0, static_cast<double>(d.n)))
        fail(errc::invalid_request, "weights must sum to n");
    for (double w : d.weights)
        if (w < 0.0) fail(errc::invalid_request, "weights must be non-negative");
    int fsum = std::accumulate(d.frequencies.begin(), d.frequencies.end(), 0);
    if (fsum != d.n) fail(errc::invalid_request, "frequencies must sum to n exactly");
    for (int f : d.frequencies)
        if (f < 0) fail(errc::invalid_request, "frequencies must be non-negative");
}

}  // namespace

Design hoel_levine_design(const DesignRequest& req) {
    req.validate();
    if (!req.target) fail(errc::invalid_request, "hoel_levine_design needs a target");

    NodeSet nodes(mapped_nodes(chebyshev_nodes(req.g), req.interval), req.interval);
    LagrangeBasis basis(nodes);
    std::vector<double> l = basis.eval(*req.target);
    double sum_abs = 0.0;
    for (double v : l) sum_abs += std::abs(v);
    std::vector<double> weights(l.size());
    for (std::size_t j = 0; j < l.size(); ++j)
        weights[j] = req.n * std::abs(l[j]) / sum_abs;

    std::vector<int> freq = round_frequencies(weights, req.n);
    lift_zero_frequencies(freq);
    Design d{std::move(nodes), std::move(weights), std::move(freq),
             req.n, DesignKind::hoel_levine, req.target};
    validate_design(d);
    return d;
}

Design guest_design(const DesignRequest& req) {
    req.validate();
    if (req.target) fail(errc::invalid_request, "guest_design takes no target");

    std::vector<double> unit;
    unit.push_back(-1.0);
    for (double r : legendre_deriv_roots(req.g - 1)) unit.push_back(r);
    unit.push_back(1.0);
    NodeSet unit_set(std::move(unit), Interval::unit());
    NodeSet nodes(mapped_nodes(unit_set, req.interval), req.interval);

    std::vector<double> weights(static_cast<std::size_t>(req.g),
                                static_cast<double>(req.n) / req.g);
    std::vector<int> freq = round_frequencies(weights, req.n);
    lift_zero_frequencies(freq);
    Design d{std::move(nodes), std::move(weights), std::move(freq),
             req.n, DesignKind::guest, std::nullopt};
    validate_design(d);
    return d;
}

Design custom_design(NodeSet nodes, std::vector<double> weights, int n) {
    std::vector<int> freq = round_frequencies(weights, n);
    Design d{std::move(nodes), std::move(weights), std::move(freq),
             n, DesignKind::custom, std::nullopt};
    validate_design(d);
    return d;
}

Design rescale_design(const Design& d, const Interval& interval) {
    const Interval& old = d.nodes.interval();
    std::vector<double> nodes(d.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        nodes[i] = from_unit(interval, to_unit(old, d.nodes[i]));
    Design out{NodeSet(std::move(nodes), interval), d.weights, d.frequencies,
               d.n, d.kind, d.target};
    validate_design(out);
    return out;
}

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void append_real_array(std::string& out, const std::vector<double>& vs) {
    out += '[';
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ',';
        out += format_real(vs[i]);
    }
    out += ']';
}

}  // namespace

std::string to_json(const Design& d) {
    std::string out = "{\"kind\":\"";
    out += design_kind_name(d.kind);
    out += "\",\"interval\":[";
    out += format_real(d.nodes.interval().lo);
    out += ',';
    out += format_real(d.nodes.interval().hi);
    out += "],\"nodes\":";
    append_real_array(out, d.nodes.nodes());
    out += ",\"weights\":";
    append_real_array(out, d.weights);
    out += ",\"frequencies\":[";
    for (std::size_t i = 0; i < d.frequencies.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(d.frequencies[i]);
    }
    out += "],\"n\":";
    out += std::to_string(d.n);
    if (d.target) {
        out += ",\"target\":";
        out += format_real(*d.target);
    }
    out += '}';
    return out;
}

Design design_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("design JSON: ") + e.what());
    }
    try {
        const auto iv = j.at("interval");
        Interval interval(iv.at(0).get<double>(), iv.at(1).get<double>());
        NodeSet nodes(j.at("nodes").get<std::vector<double>>(), interval);
        Design d{std::move(nodes),
                 j.at("weights").get<std::vector<double>>(),
                 j.at("frequencies").get<std::vector<int>>(),
                 j.at("n").get<int>(),
                 design_kind_from_name(j.at("kind").get<std::string>()),
                 std::nullopt};
        if (j.contains("target")) d.target = j.at("target").get<double>();
        validate_design(d);
        return d;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("design JSON: ") + e.what());
    }
}

}  // namespace optdesign
