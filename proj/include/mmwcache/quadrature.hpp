#pragma once

#include <functional>
#include <vector>

namespace mmwc {

// Gauss-Laguerre rule for integrals of the form int_0^inf exp(-x) g(x) dx.
struct QuadratureRule {
    std::vector<double> nodes;    // roots of L_q, ascending
    std::vector<double> weights;  // sum to 1
    int order = 0;
};

// Nodes by Newton iteration on the Laguerre recurrence, weights via
// w_i = x_i / ((q+1)^2 L_{q+1}(x_i)^2). Supports 1 <= q1 <= 128.
QuadratureRule gauss_laguerre(int q1);

// Adaptive Gauss-Kronrod (G7, K15) to an absolute tolerance; refines the
// worst panel first under a global error budget.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-8, int max_panels = 4096);

// Bisection on a bracketing interval; f(lo) and f(hi) must differ in sign.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-12, int max_iter = 200);

}  // namespace mmwc
