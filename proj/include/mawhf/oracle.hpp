#pragma once

#include "mawhf/asymptotics.hpp"
#include "mawhf/montecarlo.hpp"

namespace mawhf {

struct OracleOptions {
    std::size_t n = 1000000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    /// Probe points per curve.
    int probes = 10;
    double level = 0.99;
};

struct OracleComparison {
    double s = 0.0;
    std::vector<CurveRequest> requests;
    CompareReport report;
    double seconds = 0.0;
};

/// Simulates xi over [0, theta_s] and compares the empirical laws of the
/// supremum, of xi - inf, of xi(theta_s), of xi - sup and of the infimum with
/// the analytic curves.
OracleComparison compare_horizon_laws(const ModelSpec& spec, double s, const OracleOptions& opt = {});

/// Compares the all-time infimum (simulated over the horizon 50/m1) with the
/// ruin curve. Requires m1 > 0 and an upper model.
OracleComparison compare_all_time_infimum(const ModelSpec& spec, const OracleOptions& opt = {});

}  // namespace mawhf
