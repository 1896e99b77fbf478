#pragma once

#include "pds/instance.hpp"
#include "pds/propagation.hpp"
#include "pds/reductions.hpp"
#include "pds/decompose.hpp"
#include "pds/forts.hpp"
#include "pds/hitting_set.hpp"
#include "pds/solver.hpp"
#include "pds/bruteforce.hpp"
#include "pds/ipds.hpp"
#include "pds/hardness.hpp"
#include "pds/milp.hpp"
