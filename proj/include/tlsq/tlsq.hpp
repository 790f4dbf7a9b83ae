#pragma once

#include "tlsq/constants.hpp"
#include "tlsq/dataset.hpp"
#include "tlsq/error.hpp"
#include "tlsq/field_map.hpp"
#include "tlsq/fitter.hpp"
#include "tlsq/kernels.hpp"
#include "tlsq/model.hpp"
#include "tlsq/physics.hpp"
#include "tlsq/quadrature.hpp"
#include "tlsq/random.hpp"
#include "tlsq/simulate.hpp"
