#pragma once

#include "nexpga/problem.hpp"
#include "nexpga/prox_ops.hpp"
#include "nexpga/solver.hpp"
#include "nexpga/baselines.hpp"
#include "nexpga/random.hpp"
#include "nexpga/instances.hpp"
#include "nexpga/metrics.hpp"
#include "nexpga/experiment.hpp"
