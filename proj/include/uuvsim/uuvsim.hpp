#pragma once

// Convenience header pulling in the whole library.

#include "uuvsim/angles.hpp"
#include "uuvsim/config.hpp"
#include "uuvsim/dynamic_control.hpp"
#include "uuvsim/errors.hpp"
#include "uuvsim/estimation.hpp"
#include "uuvsim/io.hpp"
#include "uuvsim/kinematic_control.hpp"
#include "uuvsim/metrics.hpp"
#include "uuvsim/shunting.hpp"
#include "uuvsim/sim.hpp"
#include "uuvsim/trajectory.hpp"
#include "uuvsim/vehicle.hpp"
