#pragma once

#include "gmech/algebra.hpp"
#include "gmech/epdiff1d.hpp"
#include "gmech/errors.hpp"
#include "gmech/geodesics.hpp"
#include "gmech/heavy_top.hpp"
#include "gmech/integrate.hpp"
#include "gmech/io.hpp"
#include "gmech/lie_poisson.hpp"
#include "gmech/matn.hpp"
#include "gmech/ray_optics.hpp"
#include "gmech/rigid_body.hpp"
#include "gmech/scenario.hpp"
#include "gmech/vec3.hpp"
