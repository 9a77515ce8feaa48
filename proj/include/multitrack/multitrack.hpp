#pragma once

#include "assignment.hpp"
#include "config.hpp"
#include "fitness.hpp"
#include "io.hpp"
#include "observation.hpp"
#include "orbit.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "reconstruction.hpp"
#include "scenario.hpp"
#include "swarm.hpp"
