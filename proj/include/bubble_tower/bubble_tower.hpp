#ifndef BUBBLE_TOWER_BUBBLE_TOWER_HPP
#define BUBBLE_TOWER_BUBBLE_TOWER_HPP

#include "coefficients.hpp"
#include "config.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "ode.hpp"
#include "pohozaev.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "spectrum.hpp"

#endif
