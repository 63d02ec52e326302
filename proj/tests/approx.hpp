#pragma once

#include <doctest.h>

/// Purely relative comparison; doctest::Approx alone adds an absolute floor of epsilon.
inline doctest::Approx rel(double value, double eps) { return doctest::Approx(value).epsilon(eps).scale(0.0); }
