#include "mgafem/quadrature.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <map>

namespace mgafem {

namespace {

LineRule compute_gauss_legendre(int n)
{
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/(..) halved for [0,1]
    }
    return rule;
}

TriangleRule symmetric_rule(int degree)
{
    TriangleRule rule;
    if (degree <= 1) {
        rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
        rule.weights = {1.0};
    } else if (degree == 2) {
        const double a = 2.0 / 3.0, b = 1.0 / 6.0;
        rule.points = {{a, b, b}, {b, a, b}, {b, b, a}};
        rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    } else {
        // Six-point rule of degree 4.
        const double a1 = 0.445948490915964886318329253883, w1 = 0.223381589678011465944640702198;
        const double a2 = 0.091576213509770743459571463402, w2 = 0.109951743655321867388692631136;
        const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
        rule.points = {{b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1}, {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
        rule.weights = {w1, w1, w1, w2, w2, w2};
    }
    return rule;
}

}  // namespace

const LineRule& gauss_legendre(int n)
{
    if (n < 1 || n > 64)
        throw std::invalid_argument("gauss_legendre: unsupported number of points");
    static std::mutex mutex;
    static std::map<int, LineRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

TriangleRule collapsed_triangle_rule(int degree)
{
    // x = u, y = v (1 - u) maps [0,1]^2 onto the reference triangle with
    // Jacobian (1 - u); the integrand in u has degree <= degree + 1.
    const int n = (degree + 2) / 2 + 1;
    const LineRule& g = gauss_legendre(n);
    TriangleRule rule;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = g.points[i], v = g.points[j];
            const double x = u, y = v * (1.0 - u);
            rule.points.push_back({1.0 - x - y, x, y});
            rule.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - u));
        }
    return rule;
}

const TriangleRule& triangle_rule(int degree)
{
    if (degree < 0 || degree > 40)
        throw std::invalid_argument("triangle_rule: unsupported degree");
    static std::mutex mutex;
    static std::map<int, TriangleRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(degree);
    if (it == cache.end())
        it = cache.emplace(degree, degree <= 4 ? symmetric_rule(degree) : collapsed_triangle_rule(degree)).first;
    return it->second;
}

}  // namespace mgafem
