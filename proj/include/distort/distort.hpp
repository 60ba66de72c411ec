#pragma once

#include "distort/error.hpp"
#include "distort/finite_vector.hpp"
#include "distort/norms.hpp"
#include "distort/schlumprecht.hpp"
#include "distort/dual_norm.hpp"
#include "distort/oracles.hpp"
#include "distort/io.hpp"
#include "distort/entropy.hpp"
#include "distort/entropy_max.hpp"
#include "distort/random.hpp"
#include "distort/sphere_maps.hpp"
#include "distort/constructions.hpp"
#include "distort/telescoping.hpp"
#include "distort/harness.hpp"
