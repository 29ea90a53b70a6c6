#ifndef BUBBLE_TOWER_ODE_HPP
#define BUBBLE_TOWER_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "error.hpp"

namespace bubble_tower {

struct OdeOptions
{
    double rtol = 1e-13;
    double atol = 1e-22;
    double max_step = 0.05;
    double initial_step = 1e-3;
    std::size_t max_steps = 1000000;
};

/// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
///
/// The caller drives it interval by interval with advance(); the step size
/// carries over between calls so tabulating on a fine grid is cheap. A stop
/// predicate is checked after every accepted step and lets shooting codes
/// bail out as soon as a trajectory is classified.
template <std::size_t D>
class DormandPrince
{
  public:
    using State = std::array<double, D>;

    explicit DormandPrince(OdeOptions opt = {})
      : opt_(opt)
      , h_(opt.initial_step)
    {}

    /// Integrates y from t to t_end (either direction). Returns false when
    /// `stop(t, y)` fired; t and y then hold the state at that step.
    template <class Rhs, class Stop>
    bool advance(Rhs&& f, double& t, State& y, double t_end, Stop&& stop)
    {
        const double dir = t_end >= t ? 1.0 : -1.0;
        std::size_t steps = 0;
        while (dir * (t_end - t) > 0.0) {
            if (++steps > opt_.max_steps) {
                throw Error(Errc::integration, "step budget exhausted");
            }
            const double remaining = std::abs(t_end - t);
            if (remaining <= 1e-13 * std::max(1.0, std::abs(t))) {
                t = t_end;
                break;
            }
            if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(t))) {
                throw Error(Errc::integration, "step size underflow");
            }
            double h = std::min({std::abs(h_), opt_.max_step, remaining});
            State y5, err;
            step(f, t, y, dir * h, y5, err);
            double en = 0.0;
            for (std::size_t i = 0; i < D; ++i) {
                const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                en = std::max(en, std::abs(err[i]) / sc);
            }
            if (!std::isfinite(en)) {
                h_ = 0.25 * h;
                continue;
            }
            if (en <= 1.0) {
                t = (std::abs(t_end - t) <= h) ? t_end : t + dir * h;
                y = y5;
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                h_ = h * fac;
                if (stop(t, y)) return false;
            } else {
                h_ = h * std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
        }
        return true;
    }

    template <class Rhs>
    void advance(Rhs&& f, double& t, State& y, double t_end)
    {
        advance(f, t, y, t_end, [](double, const State&) { return false; });
    }

  private:
    template <class Rhs>
    static void step(Rhs& f, double t, const State& y, double h, State& y5, State& err)
    {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        State k1 = f(t, y), k2, k3, k4, k5, k6, k7, tmp;
        for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = f(t + c2 * h, tmp);
        for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, tmp);
        for (std::size_t i = 0; i < D; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, tmp);
        for (std::size_t i = 0; i < D; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, tmp);
        for (std::size_t i = 0; i < D; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(t + h, tmp);
        for (std::size_t i = 0; i < D; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(t + h, y5);
        for (std::size_t i = 0; i < D; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    OdeOptions opt_;
    double h_;
};

} // namespace bubble_tower

#endif
