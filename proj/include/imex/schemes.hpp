#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imex/polyring.hpp"

namespace imex {

enum class Family { WBDF, MBDF, GBDF, NIMEX, SIEMS, BDF, Custom };

std::string family_name(Family f);
// Case-insensitive; accepts the enum names.
Family parse_family(const std::string& name);

// Family parameter. Exact when parsed from a decimal or fraction string.
struct Param {
    double value = 0.0;
    std::optional<Rational> exact;

    Param() = default;
    Param(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
    Param(const Rational& q) : value(static_cast<double>(q)), exact(q) {}  // NOLINT

    // "3", "2.5", "11/4", "1e-3"
    static Param parse(const std::string& text);
    std::string str() const;
};

// Uniform grid lo..hi with n points; exact when both ends are exact.
std::vector<Param> param_grid(const Param& lo, const Param& hi, int n);
// "lo:hi:n"
std::vector<Param> parse_param_grid(const std::string& spec);

struct SchemeTriad {
    int k = 0;
    std::vector<double> a;  // length k
    std::vector<double> b;  // length k+1
    std::vector<double> c;  // length k
    Family family = Family::Custom;
    std::optional<double> param;  // absent for BDF and Custom
    bool warning = false;         // zero-stability or positivity failed
    std::string warning_text;
    // Extended-precision copies from the construction (exact or long double); empty for custom triads.
    // Consumers use them only while they still round to a, b, c.
    std::vector<long double> a_ext, b_ext, c_ext;
};

struct FamilyInfo {
    Family family;
    int k_min, k_max;
    const char* param_symbol;  // "alpha", "s", ...; empty for BDF
};

// Extended coefficients when ext still rounds to v entry by entry, else v widened.
std::vector<long double> extended_coeffs(const std::vector<double>& v, const std::vector<long double>& ext);

const FamilyInfo& family_info(Family f);

// Lower end of the zero-stability parameter range as stated for each family;
// nullopt where none is documented.
std::optional<double> zero_stability_threshold(Family f, int k);

SchemeTriad make_scheme(Family family, int k, const Param& param = Param());
SchemeTriad make_custom(std::vector<double> a, std::vector<double> b, std::vector<double> c);

// Invariant violations of a triad (positivity, consistency, the identity relating rho_b and rho_c).
std::vector<std::string> validate(const SchemeTriad& s, double tol = 1e-12);

struct CharacteristicTriple {
    Poly rho_a;  // (zeta - 1) * sum a_j zeta^{k-j-1}
    Poly rho_b;
    Poly rho_c;
    Poly rho_a_reduced;  // rho_a / (zeta - 1)
};

CharacteristicTriple characteristic_triple(const SchemeTriad& s);

// Root condition on all three characteristic polynomials.
bool zero_stable(const SchemeTriad& s, const RootOptions& opt = {});

// Order conditions on the grid t_{n-j} = -j, unknowns ordered a, b, c.
struct OrderSystemAnalysis {
    bool consistent = false;
    int unknowns = 0;
    int rank = 0;
    int free_dofs = 0;                 // unknowns - rank when consistent
    std::vector<bool> determined;      // per unknown: fixed by the system
    std::vector<double> particular;    // free unknowns set to zero
    std::vector<std::string> free_names;
};

OrderSystemAnalysis analyze_order_conditions(int k, int q,
                                             const std::vector<std::optional<double>>& fixed_b = {},
                                             double consistency_tol = 1e-10);

SchemeTriad solve_order_conditions(int k, int q,
                                   const std::vector<std::optional<double>>& fixed_b = {});

// Residuals of the order-l conditions on a grid shifted by `shift`, for l = 1..q.
struct OrderResiduals {
    std::vector<double> implicit_part;  // sum a_j dtau t^l - l sum b_j t^{l-1}
    std::vector<double> explicit_part;  // sum a_j dtau t^l - l sum c_j t^{l-1} (shifted by one step)
    double max_relative = 0.0;
};

OrderResiduals order_residuals(const SchemeTriad& s, int q, double shift = 0.0);

struct TruncationReport {
    int order = 0;
    double coeff_u = 0.0;
    double coeff_F = 0.0;
};

TruncationReport truncation_leading(const SchemeTriad& s);

nlohmann::json to_json(const SchemeTriad& s);
SchemeTriad scheme_from_json(const nlohmann::json& j);
std::string format_g17(double v);

}  // namespace imex
