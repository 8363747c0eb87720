#pragma once

#include <sponge/cube.hpp>
#include <sponge/dimension.hpp>
#include <sponge/error.hpp>
#include <sponge/gap.hpp>
#include <sponge/orderings.hpp>
#include <sponge/projection.hpp>
#include <sponge/rational.hpp>
#include <sponge/sampler.hpp>
#include <sponge/separation.hpp>
#include <sponge/stopping.hpp>
#include <sponge/system.hpp>
#include <sponge/weights.hpp>
