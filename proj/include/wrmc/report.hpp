#pragma once

#include <string>

#include "wrmc/estimators.hpp"
#include "wrmc/exact.hpp"
#include "wrmc/model.hpp"

namespace wrmc {

/// Doubles render with 15 significant digits in JSON/CSV and 6 in pretty
/// tables; absent quantities render as null / "-".
std::string format_double(double v, int significant_digits);

std::string variance_report_json(const VarianceReport& r);
std::string variance_report_table(const VarianceReport& r);

std::string estimate_report_json(const EstimateReport& r);
std::string estimate_report_table(const EstimateReport& r);

std::string validation_report_json(const ValidationReport& r);
std::string validation_report_table(const ValidationReport& r);

}  // namespace wrmc
