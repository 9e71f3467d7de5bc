#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imex/numcore.hpp"
#include "imex/schemes.hpp"

namespace imex {

enum class OperatorKind { Diagonal, Dense, Laplacian1d };

// Symmetric positive semidefinite operator L in one of three storage forms.
class LinearOperator {
public:
    static LinearOperator diagonal(std::vector<double> entries);
    static LinearOperator dense(DenseMatrix m);
    // (1/h^2) tridiag(-1, 2, -1) on m interior points of (0, 1), h = 1/(m+1).
    static LinearOperator laplacian1d(int m);

    OperatorKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    const std::vector<double>& diag_entries() const noexcept { return diag_; }
    const DenseMatrix& dense_matrix() const noexcept { return dense_; }

    Vector apply(const Vector& x) const;
    // x^T L x; the squared V-seminorm surrogate.
    double energy(const Vector& x) const;
    // Throws DomainError unless L is symmetric positive semidefinite within 1e-10.
    void check_psd() const;

private:
    OperatorKind kind_ = OperatorKind::Diagonal;
    int dim_ = 0;
    std::vector<double> diag_;
    DenseMatrix dense_;
};

// Componentwise F(u) = amplitude * f(u).
enum class NonlinearityKind { None, Sin, Square, Linear };

struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::None;
    double amplitude = 0.0;
    Vector operator()(const Vector& u) const;
};

// u(t) = phi(t) * p with a scalar time profile phi and a fixed spatial vector p.
enum class TimeProfile { ExpDecay, Logistic, SinCos, Polynomial };
enum class SpaceProfile { Ones, Sine, Harmonic };

struct ExactSolution {
    TimeProfile time = TimeProfile::ExpDecay;
    SpaceProfile space = SpaceProfile::Ones;
    int degree = 1;  // Polynomial only: phi(t) = t^degree
    double phi(double t) const;
    double dphi(double t) const;
    Vector profile(int dim) const;
};

struct ProblemSpec {
    std::string name;
    int dim = 1;
    LinearOperator L;
    double varpi = 1.0;
    double mu0 = 0.0;
    double mu1 = 0.0;
    Nonlinearity F;
    std::optional<ExactSolution> exact;
    std::vector<double> u0;  // initial state when no exact solution is given
    double T = 1.0;

    // varpi > 0, 0 <= mu0 < varpi, L PSD of matching size, T > 0.
    void validate() const;
    Vector exact_at(double t) const;
    // g(t) = u'(t) + varpi L u(t) - F(u(t)) for the manufactured solution.
    Vector forcing(double t) const;
};

// Built-in problems "P1", "P2", "P3".
ProblemSpec problem_preset(const std::string& name);
ProblemSpec problem_from_json(const nlohmann::json& j);
// Parse errors carry line and column.
ProblemSpec load_problem(const std::string& path);

struct StabilityCheck {
    double intensity = 0.0;
    double lambda_I = 0.0;
    double threshold = 0.0;  // mu0 / varpi
    bool satisfied = false;
    std::string reason;  // empty when satisfied
};

StabilityCheck stability_threshold_check(const ProblemSpec& problem, const SchemeTriad& scheme);

struct RunOptions {
    bool store_trajectory = false;
    double blowup_threshold = 1e12;
};

struct IntegrationRun {
    SchemeTriad scheme;
    double tau = 0.0;
    long N = 0;
    std::vector<Vector> trajectory;  // N+1 states when stored
    Vector final_state;
    std::optional<double> err_max;  // max norm at T
    std::optional<double> err_l2;   // sqrt(tau sum_n e_n^T L e_n), not for dense L
    StabilityCheck stability;
};

IntegrationRun step_run(const ProblemSpec& problem, const SchemeTriad& scheme, double tau,
                        const RunOptions& opt = {});

struct ConvergenceRow {
    double tau = 0.0;
    std::optional<double> err_max;
    std::optional<double> err_l2;
    bool blew_up = false;
    long blowup_step = -1;
    std::string failure;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::optional<double> slope;     // least squares on log err_max vs log tau
    std::optional<double> slope_l2;
    int fitted = 0;
    bool unstable = false;  // some run blew up
    StabilityCheck stability;
};

// tau list strictly decreasing with at least 3 entries; runs may execute concurrently.
ConvergenceStudy convergence_study(const ProblemSpec& problem, const SchemeTriad& scheme,
                                   const std::vector<double>& taus, int threads = 0);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// "tau,err_max,err_l2,slope"; slope is the pairwise slope to the previous row.
std::string convergence_csv(const ConvergenceStudy& study);

}  // namespace imex
