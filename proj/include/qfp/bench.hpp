#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfp/circuit.hpp"
#include "qfp/formats.hpp"
#include "qfp/oracle.hpp"

namespace qfp {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Reciprocal benchmark: per width, `samples` Gaussian draws are encoded,
// pushed through the Newton reciprocal circuit, and scored against the
// double-precision reciprocal of the encoded input. Draws without a
// representable encoding or reciprocal are discarded and counted.
struct RecipBenchConfig {
    std::vector<uint32_t> widths{10, 12, 14, 16, 18, 20};
    std::vector<uint32_t> mantissas{6, 7, 9, 11, 12, 13};
    std::vector<uint32_t> exponents{4, 5, 5, 5, 6, 7};
    uint32_t samples = 100;
    uint32_t iterations = 10;
    double gauss_mean = 0.0;
    double gauss_stddev = 5.0;
    uint64_t seed = 1;
    Backend backend = Backend::Semantic;

    void validate() const;
};

struct RecipSampleRow {
    uint32_t width, e, m;
    uint32_t sample;
    double input;      // the Gaussian draw
    double expected;   // 1 / decode(encode(input)) in double precision
    double output;     // decoded circuit result
    double signed_rel_err;
    bool discarded;
};

struct RecipWidthSummary {
    uint32_t width, e, m;
    uint32_t kept = 0, discarded = 0;
    double mean_abs_err = 0, stddev_err = 0, min_err = 0, max_err = 0;
    CircuitStats stats;
};

struct RecipBenchResult {
    RecipBenchConfig config;
    std::vector<RecipSampleRow> rows;
    std::vector<RecipWidthSummary> summaries;

    std::string csv() const;
    std::string summary_json() const;
};

RecipBenchResult run_recip_bench(const RecipBenchConfig& config);

// ODE benchmark: trapezoidal integration of du/dt = [[0,1],[-1,0]]u from
// u(0) = [0,-1], u carried in float registers, constants encoded nearest.
struct OdeConfig {
    std::vector<uint32_t> widths{14, 16, 18, 20};
    std::vector<uint32_t> mantissas{9, 11, 12, 13};
    std::vector<uint32_t> exponents{5, 5, 6, 7};
    std::vector<double> dts{0.25, 0.125, 0.0625, 0.03125};
    double horizon = 6.283185307179586;
    uint64_t seed = 1;
    Backend backend = Backend::Semantic;

    void validate() const;
};

struct OdeStepRow {
    uint32_t width;
    double dt;
    uint32_t step;
    double t;
    double u1, u2;
    double u1_exact, u2_exact;
    double l2_rel_err;  // running, over all steps so far
};

struct OdeCaseSummary {
    uint32_t width, e, m;
    double dt;
    uint32_t steps;
    double final_l2_rel_err;
    CircuitStats stats;
};

struct OdeResult {
    OdeConfig config;
    std::vector<OdeStepRow> rows;
    std::vector<OdeCaseSummary> summaries;

    std::string csv() const;
    std::string summary_json() const;
};

OdeResult run_ode(const OdeConfig& config);

// Resource report: builds the named operation at each width and tabulates
// counts by (kind, arity), depth, qubit totals, and the ancilla peak.
struct ResourcesConfig {
    std::string op = "recip";  // add | mul | recip | shift | zeroexp
    std::vector<uint32_t> widths{10, 12, 14, 16, 18, 20};
    std::vector<uint32_t> mantissas{6, 7, 9, 11, 12, 13};
    std::vector<uint32_t> exponents{4, 5, 5, 5, 6, 7};
    uint32_t recip_iterations = 10;

    void validate() const;
};

struct ResourcesCase {
    uint32_t width;
    CircuitStats stats;
};

struct ResourcesResult {
    ResourcesConfig config;
    std::vector<ResourcesCase> cases;

    std::string csv() const;
    std::string summary_json() const;
};

ResourcesResult run_resources(const ResourcesConfig& config);

// Encode helper used by the CLI: prints codes and decoded values for both
// rounding modes.
std::string describe_encoding(double x, FloatFormat fmt);

// Least-squares fit diagnostics used by the resource-scaling checks.
double r_squared_linear(const std::vector<double>& x, const std::vector<double>& y);
double r_squared_quadratic(const std::vector<double>& x, const std::vector<double>& y);

double gaussian_sample(RngStream& rng, double mean, double stddev);

}  // namespace qfp
