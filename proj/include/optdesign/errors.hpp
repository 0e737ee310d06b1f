#pragma once

#include <stdexcept>
#include <string>

namespace optdesign {

enum class errc {
    degenerate_nodes,
    unsupported_degree,
    invalid_interval,
    invalid_request,
    not_extrapolation,
    infinite_variance,
    domain_error,
    insufficient_data,
    insufficient_replication,
    non_positive_dof,
    collinear_design,
    covariance_not_pd,
    simplification_inapplicable,
    parse_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::degenerate_nodes: return "degenerate-nodes";
        case errc::unsupported_degree: return "unsupported-degree";
        case errc::invalid_interval: return "invalid-interval";
        case errc::invalid_request: return "invalid-request";
        case errc::not_extrapolation: return "not-extrapolation";
        case errc::infinite_variance: return "infinite-variance";
        case errc::domain_error: return "domain-error";
        case errc::insufficient_data: return "insufficient-data";
        case errc::insufficient_replication: return "insufficient-replication";
        case errc::non_positive_dof: return "non-positive-dof";
        case errc::collinear_design: return "collinear-design";
        case errc::covariance_not_pd: return "covariance-not-pd";
        case errc::simplification_inapplicable: return "simplification-inapplicable";
        case errc::parse_error: return "parse-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace optdesign
