#pragma once

#include <doctest.h>

// doctest::Approx adds an absolute floor of epsilon * 1; SI-scale values
// (seconds, s^2) need a purely relative comparison.
inline doctest::Approx rel(double value) { return doctest::Approx(value).scale(0.0); }
