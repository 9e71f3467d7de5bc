#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "imex/schemes.hpp"

namespace imex {

// sum_j c_j e^{i j theta}
class TrigSymbol {
public:
    TrigSymbol() = default;
    explicit TrigSymbol(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
    const std::vector<double>& coeffs() const noexcept { return c_; }
    std::complex<double> operator()(double theta) const;

private:
    std::vector<double> c_;
};

enum class Which { A, B, C };
TrigSymbol symbol_of(const SchemeTriad& s, Which which);

struct IndicatorReport {
    double sigma_F = 0.0;    // max 1/|a|
    double sigma_E = 0.0;    // max |c/a|
    double lambda_I = 0.0;   // min Re(b/a)
    double intensity = 0.0;  // lambda_I / sigma_E
    double theta_F = 0.0, theta_E = 0.0, theta_I = 0.0;
    int grid_size = 0;
    bool refined = false;
};

IndicatorReport indicators(const SchemeTriad& s, int grid_size = 8192);

// max over [0, pi] of Re(b/a), the upper end of the composite symbol range.
double max_re_b_over_a(const SchemeTriad& s, int grid_size = 8192);

struct SweepEntry {
    Param param;
    std::optional<IndicatorReport> report;  // empty when the scheme failed
    bool warning = false;
    std::string error;
};

struct SweepResult {
    Family family = Family::Custom;
    int k = 0;
    std::vector<SweepEntry> entries;
    std::optional<std::size_t> argmax_lambda;
    std::optional<std::size_t> argmax_intensity;
};

// threads <= 0 takes the cap from IMEX_THREADS (or hardware concurrency).
SweepResult indicator_sweep(Family family, int k, const std::vector<Param>& grid, int grid_size = 8192,
                            int threads = 0);

struct ParamOptimum {
    double param = 0.0;
    IndicatorReport report;
};

enum class Objective { LambdaI, Intensity };

// Golden-section search for the maximizing parameter in [lo, hi].
ParamOptimum maximize_over_param(Family family, int k, double lo, double hi, Objective objective,
                                 double param_tol = 1e-7, int grid_size = 8192);

struct ThetaCurves {
    std::vector<double> theta, inv_abs_a, abs_c_over_a, re_b_over_a;
};

ThetaCurves theta_curves(const SchemeTriad& s, int n_points);
std::string curves_csv(const ThetaCurves& curves);

nlohmann::json to_json(const IndicatorReport& r);

}  // namespace imex
