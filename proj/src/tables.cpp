#include "imex/tables.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "imex/error.hpp"

namespace imex {

namespace {

using CF = ClosedForm;
constexpr BoundKind EQ = BoundKind::Equal;
constexpr BoundKind LO = BoundKind::Lower;
constexpr BoundKind UP = BoundKind::Upper;

const char* const kQuantities[] = {"sigma_F", "sigma_E", "lambda_I", "intensity"};

std::vector<CF> wbdf(int k, double a) {
    if (a < 1.0) return {};
    switch (k) {
        case 2:
            return {{"sigma_F", 1.0, EQ},
                    {"sigma_E", (2 * a + 1) / (2 * a), EQ},
                    {"lambda_I", (2 * a - 1) / (2 * a), EQ},
                    {"intensity", (2 * a - 1) / (2 * a + 1), EQ}};
        case 3:
            return {{"sigma_F", 1.0, EQ},
                    {"sigma_E", 3 * (6 * a + 1) / (2 * (6 * a - 1)), EQ},
                    {"lambda_I", 3 * (2 * a - 1) / (2 * (6 * a - 1)), EQ},
                    {"intensity", (2 * a - 1) / (6 * a + 1), EQ}};
        case 4: {
            // equalities from alpha >= 6/5, one-sided bounds on [1, 6/5)
            const bool eq = a >= 1.2 - 1e-15;
            return {{"sigma_F", 1.0, eq ? EQ : LO},
                    {"sigma_E", 3 * (14 * a + 1) / (4 * (5 * a - 1)), eq ? EQ : LO},
                    {"lambda_I", 3 * (2 * a - 1) / (4 * (5 * a - 1)), eq ? EQ : UP},
                    {"intensity", (2 * a - 1) / (14 * a + 1), eq ? EQ : UP}};
        }
        case 5:
            return {{"sigma_F", 1.0, LO},
                    {"sigma_F", (24 * a - 1) / (20 * a), UP},
                    {"sigma_E", 15 * (30 * a + 1) / (32 * (5 * a - 1)), LO},
                    {"sigma_E", 15 * (15 * a + 2) / (16 * (5 * a - 1)), UP},
                    {"lambda_I", (15 * a - 13) / (16 * (5 * a - 1)), LO},
                    {"lambda_I", 15 * (2 * a - 1) / (32 * (5 * a - 1)), UP},
                    {"intensity", (15 * a - 13) / (15 * (15 * a + 2)), LO},
                    {"intensity", (2 * a - 1) / (30 * a + 1), UP}};
        default: return {};
    }
}

std::vector<CF> gbdf(int k, double b) {
    if (b < 1.0) return {};
    const double b2 = b * b, b3 = b2 * b, b4 = b3 * b;
    switch (k) {
        case 2: return wbdf(2, b);
        case 3: {
            const double d = 6 * b2 + 6 * b - 2, e = 6 * b2 + 12 * b + 3;
            return {{"sigma_F", 1.0, EQ},
                    {"sigma_E", e / d, EQ},
                    {"lambda_I", (6 * b2 - 4) / d, LO},
                    {"lambda_I", (6 * b2 - 3) / d, UP},
                    {"intensity", (6 * b2 - 4) / e, LO},
                    {"intensity", (6 * b2 - 3) / e, UP}};
        }
        case 4: {
            const double d = 4 * (b3 + 3 * b2 + b - 1);
            const double e_hi = 4 * b3 + 19 * b2 + 20 * b + 3, e_lo = 4 * b3 + 18 * b2 + 20 * b + 3;
            const double l_lo = 4 * b3 + 5 * b2 - 4 * b - 3, l_hi = 4 * b3 + 6 * b2 - 4 * b - 3;
            return {{"sigma_F", 1.0, LO},
                    {"sigma_F", (11 * b - 1) / (10 * b), UP},
                    {"sigma_E", e_lo / d, LO},
                    {"sigma_E", e_hi / d, UP},
                    {"lambda_I", l_lo / d, LO},
                    {"lambda_I", l_hi / d, UP},
                    {"intensity", l_lo / e_hi, LO},
                    {"intensity", l_hi / e_lo, UP}};
        }
        case 5: {
            const double d = 10 * b4 + 60 * b3 + 90 * b2 - 32;
            const double e_lo = 2 * b4 + 16 * b3 + 40 * b2 + 32 * b + 3;
            const double l_hi = 2 * b4 + 8 * b3 + 4 * b2 - 8 * b - 3;
            // the table's upper/lower pair switches at beta = 18
            const bool large = b >= 18.0;
            const double e_hi = large ? 2 * b4 + 21 * b3 + 29 * b2 + 38 * b + 5 : 2 * b4 + 30 * b3 + 32 * b2 + 38 * b + 5;
            const double l_lo = large ? 2 * b4 + 3 * b3 + 25 * b2 - 9 * b - 3 : 2 * b4 + b3 + 4 * b2 - 4 * b - 2;
            return {{"sigma_F", 1.0, LO},
                    {"sigma_F", (20 * b - 1) / (10 * b), UP},
                    {"sigma_E", 5 * e_lo / d, LO},
                    {"sigma_E", 5 * e_hi / d, UP},
                    {"lambda_I", 5 * l_lo / d, LO},
                    {"lambda_I", 5 * l_hi / d, UP},
                    {"intensity", l_lo / e_hi, LO},
                    {"intensity", l_hi / e_lo, UP}};
        }
        default: return {};
    }
}

std::vector<CF> mbdf(int k, double s) {
    if (k == 2 && s > 1) {
        const double r = std::sqrt(2 * s + 6);
        return {{"sigma_F", 1.0, EQ},
                {"sigma_E", 1.5, EQ},
                {"lambda_I", (s + 4 * r - 13) / (3 * (s - 1)), EQ},
                {"intensity", (2 * s + 8 * r - 26) / (9 * (s - 1)), EQ}};
    }
    if (k == 3 && s > 2)
        return {{"sigma_F", 1.0, EQ}, {"sigma_E", 2.1, EQ}, {"lambda_I", 0.4, UP}, {"intensity", 4.0 / 21.0, UP}};
    return {};
}

std::vector<CF> nimex(int k, double d) {
    if (k == 2 && d >= 1.2 - 1e-15) {
        const double d2 = d * d, d3 = d2 * d, d4 = d3 * d;
        const double q = 4 * d2 - 5 * d + 1;
        const double num = 4 * std::sqrt(2.0) * std::sqrt(std::pow(2 * d - 1, 3) * q * q) + 192 * d4 - 416 * d3 +
                           316 * d2 - 100 * d + 11;
        const double den = 16 * d2 - 16 * d + 3;
        return {{"sigma_F", 1.0, EQ},
                {"sigma_E", (4 * d - 1) / (4 * d - 2), EQ},
                {"lambda_I", num / (den * den), EQ},
                {"intensity", 2 * num * (2 * d - 1) / ((3 - 4 * d) * (3 - 4 * d) * std::pow(4 * d - 1, 3)), EQ}};
    }
    if (k == 3 && d >= 2.0) {
        const double d2 = d * d;
        const double den = 36 * d2 - 36 * d + 10, e = 36 * d2 - 18 * d + 3, l = 24 * d2 - 21 * d + 3;
        return {{"sigma_F", 1.0, EQ}, {"sigma_E", e / den, EQ}, {"lambda_I", l / den, LO}, {"intensity", l / e, LO}};
    }
    return {};
}

bool siems_in_range(int k, double g) {
    const double eps = 1e-12;
    switch (k) {
        case 2:
        case 3: return g >= 1.0 - eps;
        case 4: return g >= 1.2 - eps;
        case 5: return g >= 1.4 - eps;
        case 6: return g >= 2.0 - eps && g <= 17.0 + eps;
        case 7: return g >= 2.2 - eps && g <= 9.0 + eps;
        case 8: return g >= 2.5 - eps && g <= 6.0 + eps;
        default: return false;
    }
}

// Table values of lambda_I and the intensity for SIEMS.
std::pair<double, double> siems_lambda_intensity(int k, double g) {
    const double t = 2 * g - 1;
    const double g2 = g * g, g3 = g2 * g, g4 = g3 * g, g5 = g4 * g, g6 = g5 * g, g7 = g6 * g;
    switch (k) {
        case 2: return {t / (2 * g), t / (2 * g + 1)};
        case 3: return {3 * t * t / (12 * g2 - 2), t * t / (4 * g2 + 4 * g - 1)};
        case 4:
            return {3 * std::pow(t, 3) / (4 * (6 * g3 - 3 * g + 1)),
                    std::pow(t, 3) / (8 * g3 + 12 * g2 - 6 * g + 1)};
        case 5:
            return {15 * std::pow(t, 4) / (16 * (15 * g4 - 15 * g2 + 10 * g - 2)),
                    std::pow(t, 4) / (16 * g4 + 32 * g3 - 24 * g2 + 8 * g - 1)};
        case 6:
            return {15 * std::pow(t, 5) / (16 * (30 * g5 - 50 * g3 + 50 * g2 - 20 * g + 3)),
                    std::pow(t, 5) / (32 * g5 + 80 * g4 - 80 * g3 + 40 * g2 - 10 * g + 1)};
        case 7:
            return {105 * std::pow(t, 6) / (16 * (420 * g6 - 1050 * g4 + 1400 * g3 - 840 * g2 + 252 * g - 31)),
                    std::pow(t, 6) / (64 * g6 + 192 * g5 - 240 * g4 + 160 * g3 - 60 * g2 + 12 * g - 1)};
        case 8:
            return {105 * std::pow(t, 7) /
                        (32 * (420 * g7 - 1470 * g5 + 2450 * g4 - 1960 * g3 + 882 * g2 - 217 * g + 23)),
                    std::pow(t, 7) / (128 * g7 + 448 * g6 - 672 * g5 + 560 * g4 - 280 * g3 + 84 * g2 - 14 * g + 1)};
        default: return {std::nan(""), std::nan("")};
    }
}

std::vector<CF> siems(int k, double g) {
    if (!siems_in_range(k, g)) return {};
    const auto [lam, inten] = siems_lambda_intensity(k, g);
    return {{"sigma_F", 1.0, EQ}, {"sigma_E", lam / inten, EQ}, {"lambda_I", lam, EQ}, {"intensity", inten, EQ}};
}

std::vector<CF> bdf(int k) {
    if (k == 1)
        return {{"sigma_F", 1.0, EQ}, {"sigma_E", 1.0, EQ}, {"lambda_I", 1.0, EQ}, {"intensity", 1.0, EQ}};
    return wbdf(k, 1.0);
}

}  // namespace

const char* bound_kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::Equal: return "eq";
        case BoundKind::Lower: return "lower";
        case BoundKind::Upper: return "upper";
    }
    return "?";
}

std::vector<ClosedForm> closed_forms(Family family, int k, double param) {
    switch (family) {
        case Family::WBDF: return wbdf(k, param);
        case Family::GBDF: return gbdf(k, param);
        case Family::MBDF: return mbdf(k, param);
        case Family::NIMEX: return nimex(k, param);
        case Family::SIEMS: return siems(k, param);
        case Family::BDF: return bdf(k);
        case Family::Custom: return {};
    }
    return {};
}

std::vector<Param> default_table_grid(Family family, int k) {
    auto P = [](const char* s) { return Param::parse(s); };
    switch (family) {
        case Family::WBDF: return {P("1"), P("2"), P("3"), P("5"), P("10")};
        case Family::GBDF: return {P("1"), P("2"), P("5"), P("9"), P("10"), P("20")};
        case Family::MBDF:
            if (k == 2) return {P("2"), P("3"), P("5"), P("10")};
            return {P("3"), P("5"), P("10")};
        case Family::NIMEX:
            if (k == 2) return {P("6/5"), P("2"), P("11/4"), P("5"), P("10")};
            return {P("2"), P("3"), P("5"), P("10")};
        case Family::SIEMS:
            switch (k) {
                case 2:
                case 3: return {P("1"), P("2"), P("3"), P("5")};
                case 4: return {P("6/5"), P("2"), P("3"), P("5")};
                case 5: return {P("7/5"), P("2"), P("3"), P("5")};
                case 6: return {P("2"), P("5"), P("10"), P("17")};
                case 7: return {P("11/5"), P("4"), P("6"), P("9")};
                case 8: return {P("5/2"), P("3"), P("9/2"), P("6")};
                default: return {};
            }
        case Family::BDF: return {Param()};
        case Family::Custom: return {};
    }
    return {};
}

double quantity_of(const IndicatorReport& r, const std::string& q) {
    if (q == "sigma_F") return r.sigma_F;
    if (q == "sigma_E") return r.sigma_E;
    if (q == "lambda_I") return r.lambda_I;
    if (q == "intensity") return r.intensity;
    throw DomainError("unknown quantity '" + q + "'");
}

bool closed_form_holds(double computed, const ClosedForm& cf, double tol) {
    switch (cf.kind) {
        case BoundKind::Equal: return std::abs(computed - cf.value) <= tol;
        case BoundKind::Lower: return computed >= cf.value - tol;
        case BoundKind::Upper: return computed <= cf.value + tol;
    }
    return false;
}

std::vector<TableRow> table_rows(Family family, int k, const std::vector<Param>& params, double tol, int grid_size) {
    std::vector<TableRow> rows;
    for (const Param& p : params) {
        const SchemeTriad s = make_scheme(family, k, p);
        const IndicatorReport rep = indicators(s, grid_size);
        const std::vector<ClosedForm> forms = closed_forms(family, k, p.value);
        for (const char* q : kQuantities) {
            const double computed = quantity_of(rep, q);
            bool any = false;
            for (const auto& cf : forms) {
                if (cf.quantity != q) continue;
                any = true;
                rows.push_back({family, k, p, q, computed, cf.value, cf.kind, computed - cf.value,
                                closed_form_holds(computed, cf, tol)});
            }
            if (!any)
                rows.push_back({family, k, p, q, computed, std::numeric_limits<double>::quiet_NaN(), BoundKind::Equal,
                                std::numeric_limits<double>::quiet_NaN(), true});
        }
    }
    return rows;
}

std::string table_csv(const std::vector<TableRow>& rows) {
    std::ostringstream os;
    os << "family,k,param,quantity,computed,closed_form,kind,discrepancy,ok\n";
    for (const auto& r : rows) {
        const bool known = !std::isnan(r.closed_form);
        os << family_name(r.family) << ',' << r.k << ',' << (r.family == Family::BDF ? "" : r.param.str()) << ','
           << r.quantity << ',' << format_g17(r.computed) << ',' << (known ? format_g17(r.closed_form) : "") << ','
           << (known ? bound_kind_name(r.kind) : "") << ',' << (known ? format_g17(r.discrepancy) : "") << ','
           << (r.ok ? "true" : "false") << '\n';
    }
    return os.str();
}

}  // namespace imex
