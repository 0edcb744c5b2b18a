#pragma once

#include <cmath>
#include <vector>

namespace toa {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Ascending grid lo, lo + step, ... up to hi (inclusive within step/1000).
std::vector<double> db_grid(double lo_db, double hi_db, double step_db);

}  // namespace toa
