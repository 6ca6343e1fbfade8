#pragma once

#include "mawhf/model.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace mawhf {

/// Counter-based generator: every path owns an independent stream derived
/// from (seed, path index).
class SplitMix64 {
public:
    SplitMix64(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    /// Uniform on (0, 1).
    double uniform();
    double exponential(double rate);

private:
    std::uint64_t state_;
};

struct LevelRecord {
    /// First passage time; +infinity when the level is not crossed.
    double tau = std::numeric_limits<double>::infinity();
    /// Up-crossings: xi(tau) - x and x - xi(tau-). Down-crossings: x - xi(tau)
    /// and xi(tau-) - x.
    double overshoot = 0.0;
    double undershoot = 0.0;
    int state = -1;

    bool crossed() const { return state >= 0; }
    double total_jump() const { return overshoot + undershoot; }
};

struct TrajectoryRecord {
    double xi_final = 0.0;
    double sup = 0.0;
    double inf = 0.0;
    int state_initial = 0;
    int state_final = 0;
    double horizon = 0.0;
    /// One entry per requested level; levels > 0 are up-crossings, < 0 down.
    std::vector<LevelRecord> levels;
};

struct SimOptions {
    double s = 1.0;
    std::size_t n = 10000;
    std::uint64_t seed = 1;
    std::vector<double> levels;
    /// 0 picks the hardware concurrency.
    unsigned workers = 0;
    /// Initial state of every path; -1 cycles through the states by path index.
    int initial_state = -1;
    /// > 0: fixed horizon instead of theta_s (long-horizon runs).
    double fixed_horizon = 0.0;
};

/// Empirical matrix-valued function: entry (k, r) estimates
/// P{event, x(end) = r | x(0) = k}.
struct EmpiricalMatrix {
    Matrix value;
    /// Paths started in each state.
    std::vector<std::size_t> count;
    /// 99% normal-approximation half-widths, entrywise.
    Matrix half_width;
};

struct SimBatch {
    ModelSpec spec;
    double s = 1.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double fixed_horizon = 0.0;
    std::vector<double> levels;
    std::vector<TrajectoryRecord> paths;
    std::vector<std::size_t> started_in;
    /// Empirical law of the chain at the horizon.
    Matrix occupation;

    /// Fraction of paths (per initial state) with pred(path) true, split by final state.
    EmpiricalMatrix estimate(const std::function<bool(const TrajectoryRecord&)>& pred) const;
};

SimBatch simulate_paths(const ModelSpec& spec, const SimOptions& opt);

/// Horizon used for all-time infimum runs: 50 / m1.
double long_horizon(const ModelSpec& spec);

enum class Functional { sup_tail, check_tail, xi_cdf, inf_cdf, complement_cdf };

/// Empirical estimator of an analytic curve:
///   sup_tail: P{sup > x}; check_tail: P{xi - inf > x}; xi_cdf: P{xi < x};
///   inf_cdf: P{inf < x}; complement_cdf: P{xi - sup < x}.
bool functional_event(Functional f, const TrajectoryRecord& p, double x);
std::string functional_name(Functional f);

struct ProbeComparison {
    double x = 0.0;
    Matrix analytic;
    Matrix empirical;
    Matrix z;
};

struct CurveComparison {
    Functional functional = Functional::sup_tail;
    std::vector<ProbeComparison> probes;
    /// max over probes and entries of |empirical - analytic|.
    double kolmogorov = 0.0;
    double max_abs_z = 0.0;
};

struct CompareReport {
    std::vector<CurveComparison> curves;
    double level = 0.99;
    /// Two-sided critical value after the Bonferroni correction.
    double critical_z = 0.0;
    std::size_t tests = 0;
    bool pass = true;
};

/// Analytic curve: matrix value at x.
using AnalyticCurve = std::function<Matrix(double)>;

struct CurveRequest {
    Functional functional;
    AnalyticCurve curve;
    std::vector<double> probes;
};

/// z-scores with binomial standard errors, Bonferroni across every
/// (curve, probe, entry) with positive variance.
CompareReport compare_report(const SimBatch& batch, const std::vector<CurveRequest>& requests, double level = 0.99);

/// Two-sided standard normal quantile: P{|Z| > z} = alpha.
double normal_two_sided_quantile(double alpha);

}  // namespace mawhf
