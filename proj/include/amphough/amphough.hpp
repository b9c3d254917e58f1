#pragma once

// Umbrella header for the amphough library: complex correlation filters
// over the 2-D similarity group, superposed into amplitude accumulators
// whose squared magnitude is a shape-detection probability map.

#include "amphough/accumulator_io.hpp"
#include "amphough/cli.hpp"
#include "amphough/config.hpp"
#include "amphough/correlation.hpp"
#include "amphough/errors.hpp"
#include "amphough/filters.hpp"
#include "amphough/grid.hpp"
#include "amphough/group.hpp"
#include "amphough/image_io.hpp"
#include "amphough/radon.hpp"
#include "amphough/synth.hpp"
#include "amphough/wave.hpp"
