#pragma once

#include "creach/basis.hpp"
#include "creach/christoffel.hpp"
#include "creach/cloud.hpp"
#include "creach/config.hpp"
#include "creach/errors.hpp"
#include "creach/io.hpp"
#include "creach/pac.hpp"
#include "creach/parallel.hpp"
#include "creach/rng.hpp"
#include "creach/sampler.hpp"
#include "creach/systems.hpp"
#include "creach/validator.hpp"
