#ifndef BUBBLE_TOWER_MODEL_HPP
#define BUBBLE_TOWER_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "config.hpp"
#include "error.hpp"

namespace bubble_tower {

/// Parameters of -Δu + V(|y|)u = u^p with the concrete potential
///
///   V(r) = 1 + a1 / (1 + r^m) + a2 / (1 + r^(m+1)),
///
/// whose tail is 1 + a1/r^m + a2/r^(m+1) + O(r^-2m). `tau` is the weight
/// exponent of the star norm.
struct ModelParams
{
    int N = 3;
    double p = 3.0;
    double a1 = 1.0;
    double a2 = 0.0;
    double m = 5.0;
    double tau = 0.1;

    /// Critical exponent (N+2)/(N-2) for N >= 3, infinity otherwise.
    double critical_exponent() const
    {
        return N >= 3 ? (N + 2.0) / (N - 2.0) : INFINITY;
    }

    /// Lower bound max{4/(p-1), 4} on the potential decay exponent.
    double min_decay_exponent() const { return std::max(4.0 / (p - 1.0), 4.0); }

    /// Checks needed by every routine (ODE machinery included).
    void validate() const
    {
        if (N < 1) throw Error(Errc::invalid_parameter, "dimension N must be >= 1");
        if (!(p > 1.0)) throw Error(Errc::invalid_parameter, "exponent p must exceed 1");
        if (N >= 3 && !(p < critical_exponent())) {
            std::ostringstream os;
            os << "exponent p = " << p << " must be subcritical, p < (N+2)/(N-2) = " << critical_exponent();
            throw Error(Errc::invalid_parameter, os.str());
        }
        if (!(a1 > 0.0)) throw Error(Errc::invalid_parameter, "potential coefficient a1 must be positive");
        if (!(tau > 0.0 && tau < 1.0)) throw Error(Errc::invalid_parameter, "tau must lie in (0, 1)");
        if (!(m > 0.0)) throw Error(Errc::invalid_parameter, "decay exponent m must be positive");
        check_potential_positive();
    }

    /// Tower routines additionally need N >= 3 and m > max{4/(p-1), 4}.
    void validate_tower() const
    {
        validate();
        if (N < 3) throw Error(Errc::dimension, "tower routines require N >= 3");
        check_decay_exponent();
    }

    /// Nested routines place the second family in coordinates 4..6.
    void validate_nested() const
    {
        validate();
        if (N < 6) throw Error(Errc::dimension, "nested routines require N >= 6");
        check_decay_exponent();
    }

    static ModelParams from_config(const Config& cfg, const std::string& section = {})
    {
        ModelParams mp;
        mp.N = cfg.get_int(section, "N", mp.N);
        mp.p = cfg.get_double(section, "p", mp.p);
        mp.a1 = cfg.get_double(section, "a1", mp.a1);
        mp.a2 = cfg.get_double(section, "a2", mp.a2);
        mp.m = cfg.get_double(section, "m", mp.m);
        mp.tau = cfg.get_double(section, "tau", mp.tau);
        return mp;
    }

  private:
    void check_decay_exponent() const
    {
        if (!(m > min_decay_exponent())) {
            std::ostringstream os;
            os << "decay exponent m = " << m << " violates m > max{4/(p-1), 4} = " << min_decay_exponent();
            throw Error(Errc::invalid_parameter, os.str());
        }
    }

    void check_potential_positive() const;
};

/// V(r) - 1, kept separate so the far-field decay survives in double precision.
inline double potential_excess(const ModelParams& mp, double r)
{
    return mp.a1 / (1.0 + std::pow(r, mp.m)) + mp.a2 / (1.0 + std::pow(r, mp.m + 1.0));
}

/// V(r) for the concrete global family.
inline double potential_value(const ModelParams& mp, double r) { return 1.0 + potential_excess(mp, r); }

/// Exact dV/dr of the concrete family; vanishes at r = 0 since m > 1.
inline double potential_grad_radial(const ModelParams& mp, double r)
{
    if (r <= 0.0) return 0.0;
    const double rm = std::pow(r, mp.m);
    const double rm1 = rm * r;
    const double d1 = 1.0 + rm;
    const double d2 = 1.0 + rm1;
    return -mp.a1 * mp.m * rm / (r * d1 * d1) - mp.a2 * (mp.m + 1.0) * rm / (d2 * d2);
}

inline void ModelParams::check_potential_positive() const
{
    if (a2 >= 0.0) return;
    // V -> 1 at infinity; a negative a2 can only pull V down at moderate r.
    double vmin = potential_value(*this, 0.0);
    for (int i = 0; i <= 4000; ++i) {
        const double r = std::pow(10.0, -3.0 + 6.0 * i / 4000.0);
        vmin = std::min(vmin, potential_value(*this, r));
    }
    if (!(vmin > 0.0)) {
        std::ostringstream os;
        os << "potential is not positive (min V = " << vmin << "); a2 = " << a2 << " is too negative";
        throw Error(Errc::invalid_potential, os.str());
    }
}

} // namespace bubble_tower

#endif
