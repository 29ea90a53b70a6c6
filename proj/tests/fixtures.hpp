#ifndef BUBBLE_TOWER_TESTS_FIXTURES_HPP
#define BUBBLE_TOWER_TESTS_FIXTURES_HPP

#include <map>
#include <utility>

#include "bubble_tower/bubble_tower.hpp"

namespace fixtures {

inline const bubble_tower::RadialProfile& profile(int N, double p)
{
    static std::map<std::pair<int, double>, bubble_tower::RadialProfile> cache;
    auto key = std::make_pair(N, p);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, bubble_tower::solve_ground_state(N, p)).first;
    return it->second;
}

inline const bubble_tower::RadialProfile& cubic3() { return profile(3, 3.0); }

inline const bubble_tower::CoefficientSet& coeffs3()
{
    static const auto c = bubble_tower::compute_coefficients(cubic3(), 1.0);
    return c;
}

/// N = 6, p = 1.5: U(0) lies above the default shooting bracket.
inline const bubble_tower::RadialProfile& flat6()
{
    static const auto prof = [] {
        bubble_tower::ProfileOptions opt;
        opt.s_hi = 100.0;
        return bubble_tower::solve_ground_state(6, 1.5, 1e-13, opt);
    }();
    return prof;
}

// Frozen from an independent shooting/quadrature oracle at half the
// production step size (N = 3, p = 3).
inline constexpr double golden_U0 = 4.337387679975667;
inline constexpr double golden_A1 = 18.8972513025223;
inline constexpr double golden_A2 = 37.79450260434413;
inline constexpr double golden_B1 = 92.48004593494714;

} // namespace fixtures

#endif
