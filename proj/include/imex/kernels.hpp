#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "imex/numcore.hpp"
#include "imex/schemes.hpp"
#include "imex/symbolcalc.hpp"

namespace imex {

struct DocKernelSequence {
    std::vector<double> base;  // the a-vector
    std::vector<double> doc;   // doc[0] = 1/a_0
    int n = 0;
};

DocKernelSequence doc_kernels(const std::vector<double>& a, int n);

// max_m |sum_{i=0}^{m} doc[m-i] a[i] - delta_{m0}| over m < n.
double orthogonality_residual(const DocKernelSequence& d);

struct CompositeKernels {
    std::vector<double> b_hat;
    std::vector<double> c_hat;
};

CompositeKernels composite_kernels(const SchemeTriad& s, int n);

// n x n lower-triangular Toeplitz matrix with the given first column (zero padded).
DenseMatrix lower_toeplitz(const std::vector<double>& first_column, int n);

struct ToeplitzOptions {
    int max_n = 512;
    double inverse_tol = 1e-10;  // DOC inverse vs forward substitution
    double bound_tol = 1e-8;
    double power_tol = 1e-10;
    int power_max_iter = 10000;
    std::uint64_t seed = 20240531;
};

struct ToeplitzReport {
    int n = 0;
    double min_eig_sym_Bhat = 0.0;
    double max_eig_sym_Bhat = 0.0;
    double specnorm_Ainv = 0.0;
    double specnorm_AinvC = 0.0;
    double equal_distribution_gap = 0.0;  // eigenvalue sum taken as the exact trace n b_0 / a_0
    double eigen_sum_gap = 0.0;           // same quantity from the computed eigenvalues (roundoff floor)
    double doc_residual = 0.0;
    double inverse_discrepancy = 0.0;
    int power_iterations_Ainv = 0;
    int power_iterations_AinvC = 0;
    bool power_converged = false;
    // bounds from the indicators
    double lambda_I = 0.0, sigma_F = 0.0, sigma_E = 0.0, max_re_b_over_a = 0.0;
    bool lower_bound_ok = false;  // min eig >= lambda_I - tol
    bool upper_bound_ok = false;  // min eig <= max Re(b/a) + tol
    bool ainv_ok = false;
    bool ainvc_ok = false;
    bool all_ok() const { return lower_bound_ok && upper_bound_ok && ainv_ok && ainvc_ok; }
    std::vector<double> spectrum;  // ascending eigenvalues of sym(A^{-1}B)
};

ToeplitzReport toeplitz_verify(const SchemeTriad& s, int n, const IndicatorReport& ind,
                               const ToeplitzOptions& opt = {});

nlohmann::json to_json(const ToeplitzReport& r);

}  // namespace imex
