#pragma once

#include "predprey/diagnostics.hpp"
#include "predprey/eigen.hpp"
#include "predprey/errors.hpp"
#include "predprey/fronts.hpp"
#include "predprey/grid.hpp"
#include "predprey/kinetics.hpp"
#include "predprey/minimize.hpp"
#include "predprey/params.hpp"
#include "predprey/sim.hpp"
#include "predprey/speeds.hpp"
