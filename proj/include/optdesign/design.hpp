#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optdesign/poly.hpp"

namespace optdesign {

enum class DesignKind { hoel_levine, guest, custom };

const char* design_kind_name(DesignKind k);
DesignKind design_kind_from_name(const std::string& name);

/// A design: nodes with a continuous weight allocation summing to n and the
/// rounded integer frequencies summing to n exactly.
struct Design {
    NodeSet nodes;
    std::vector<double> weights;
    std::vector<int> frequencies;
    int n;
    DesignKind kind;
    std::optional<double> target;

    std::size_t size() const { return nodes.size(); }
};

struct DesignRequest {
    int g;
    int n;
    Interval interval;
    std::optional<double> target;

    void validate() const;
};

/// cos(k*pi/(g-1)), k = g-1..0, sorted increasing on [-1,1]. Endpoints are
/// exactly -1 and 1, and the set is exactly antisymmetric.
NodeSet chebyshev_nodes(int g);

/// Floor every weight, then hand the remaining units to the largest
/// fractional parts (ties toward the lower index). Output sums to n exactly
/// and no entry deviates from its weight by 1 or more.
std::vector<int> round_frequencies(const std::vector<double>& weights, int n);

/// Extrapolation design: Chebyshev nodes with frequencies proportional to
/// |l_j(target)|. Requires a target strictly outside the interval.
Design hoel_levine_design(const DesignRequest& req);

/// Interpolation minimax design: nodes at the boundary and the roots of the
/// Legendre derivative, equal weights n/g.
Design guest_design(const DesignRequest& req);

/// A user-specified design from explicit nodes and weights.
Design custom_design(NodeSet nodes, std::vector<double> weights, int n);

/// Affinely remap the nodes onto a new interval; weights and frequencies are
/// unchanged (the Lagrange basis only sees relative positions).
Design rescale_design(const Design& d, const Interval& interval);

/// Fixed field order, reals with 17 significant digits; re-emission of a
/// parsed design is byte-identical.
std::string to_json(const Design& d);
Design design_from_json(const std::string& text);

}  // namespace optdesign
