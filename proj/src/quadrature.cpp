#include "mmwcache/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmwcache/model.hpp"

namespace mmwc {

namespace {

// Laguerre polynomial L_q(x) by the three-term recurrence; also returns L_{q-1}.
std::pair<double, double> laguerre(int q, double x) {
    double lm1 = 0.0;  // L_{k-1}
    double l = 1.0;    // L_k, starting at L_0
    for (int k = 0; k < q; ++k) {
        const double lp1 = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return {l, lm1};
}

}  // namespace

QuadratureRule gauss_laguerre(int q1) {
    if (q1 < 1 || q1 > 128)
        throw std::invalid_argument("gauss_laguerre: order must lie in [1, 128]");
    QuadratureRule rule;
    rule.order = q1;
    rule.nodes.resize(q1);
    rule.weights.resize(q1);

    double z = 0.0;
    for (int i = 0; i < q1; ++i) {
        // Stroud-Secrest style initial guesses, then Newton.
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * q1);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * q1);
        } else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
        }
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            const auto [l, lm1] = laguerre(q1, z);
            const double deriv = q1 * (l - lm1) / z;  // L_q'(x) = q (L_q - L_{q-1}) / x
            const double dz = l / deriv;
            z -= dz;
            if (std::abs(dz) <= 5e-14 * std::max(1.0, z)) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw numeric_error("gauss_laguerre: Newton iteration failed at node " +
                                std::to_string(i) + " of order " + std::to_string(q1));
        rule.nodes[i] = z;
        const double lq1 = laguerre(q1 + 1, z).first;
        rule.weights[i] = z / ((q1 + 1.0) * (q1 + 1.0) * lq1 * lq1);
    }
    return rule;
}

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
constexpr double kron_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kron_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gauss_w[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kron_x[j]);
        fv[14 - j] = f(c + h * kron_x[j]);
    }
    fv[7] = f(c);
    double resk = kron_w[7] * fv[7];
    double resg = gauss_w[3] * fv[7];
    for (int j = 0; j < 7; ++j) resk += kron_w[j] * (fv[j] + fv[14 - j]);
    for (int j = 0; j < 3; ++j) resg += gauss_w[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
    return {resk * h, std::abs(resk - resg) * h};
}

struct Panel {
    double a, b, value, err;
};

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_panels) {
    if (!(b > a)) return 0.0;
    auto by_err = [](const Panel& x, const Panel& y) { return x.err < y.err; };
    const auto first = gk15(f, a, b);
    std::vector<Panel> heap{{a, b, first.kronrod, first.err}};
    double total_err = first.err;
    while (total_err > abs_tol && static_cast<int>(heap.size()) < max_panels) {
        std::pop_heap(heap.begin(), heap.end(), by_err);
        const Panel worst = heap.back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // split exhausted
        heap.pop_back();
        total_err -= worst.err;
        const auto left = gk15(f, worst.a, mid);
        const auto right = gk15(f, mid, worst.b);
        heap.push_back({worst.a, mid, left.kronrod, left.err});
        std::push_heap(heap.begin(), heap.end(), by_err);
        heap.push_back({mid, worst.b, right.kronrod, right.err});
        std::push_heap(heap.begin(), heap.end(), by_err);
        total_err += left.err + right.err;
    }
    double total = 0.0;
    for (const auto& p : heap) total += p.value;
    return total;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw numeric_error("find_root: interval does not bracket a root");
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || (hi - lo) <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace mmwc
