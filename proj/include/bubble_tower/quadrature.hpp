#ifndef BUBBLE_TOWER_QUADRATURE_HPP
#define BUBBLE_TOWER_QUADRATURE_HPP

#include <cmath>
#include <numbers>
#include <vector>

namespace bubble_tower {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre
{
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussLegendre(int n)
      : x(n)
      , w(n)
    {
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels,
/// summed in a fixed order.
template <class F>
double composite_gl(F&& f, double a, double b, int panels, const GaussLegendre& rule)
{
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * width;
        const double mid = lo + 0.5 * width;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(mid + 0.5 * width * rule.x[i]);
        total += 0.5 * width * s;
    }
    return total;
}

} // namespace bubble_tower

#endif
