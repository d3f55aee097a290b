#pragma once

#include <functional>

namespace hke {

// Recursive adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// Tensor-product adaptive quadrature over the centered cube [-half, half]^dim.
double adaptive_cube(const std::function<double(const double*)>& f, int dim, double half,
                     double tol);

} // namespace hke
