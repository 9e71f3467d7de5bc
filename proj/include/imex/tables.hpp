#pragma once

#include <string>
#include <vector>

#include "imex/schemes.hpp"
#include "imex/symbolcalc.hpp"

namespace imex {

// How a closed form relates to the computed quantity.
enum class BoundKind { Equal, Lower, Upper };
const char* bound_kind_name(BoundKind k);

struct ClosedForm {
    std::string quantity;  // sigma_F, sigma_E, lambda_I, intensity
    double value = 0.0;
    BoundKind kind = BoundKind::Equal;
};

// Known closed forms and bounds for a catalog scheme; empty outside the stated parameter ranges.
std::vector<ClosedForm> closed_forms(Family family, int k, double param);

// Parameter values used by the tables command when none are given.
std::vector<Param> default_table_grid(Family family, int k);

struct TableRow {
    Family family = Family::Custom;
    int k = 0;
    Param param;
    std::string quantity;
    double computed = 0.0;
    double closed_form = 0.0;
    BoundKind kind = BoundKind::Equal;
    double discrepancy = 0.0;  // computed - closed_form
    bool ok = false;
};

double quantity_of(const IndicatorReport& r, const std::string& quantity);
bool closed_form_holds(double computed, const ClosedForm& cf, double tol);

// One row per (parameter, quantity, closed form); quantities without a known form get a row
// with kind Equal, closed_form NaN and ok = true.
std::vector<TableRow> table_rows(Family family, int k, const std::vector<Param>& params, double tol = 1e-9,
                                 int grid_size = 8192);

std::string table_csv(const std::vector<TableRow>& rows);

}  // namespace imex
