#pragma once

#include "meshmdp/config.hpp"
#include "meshmdp/errors.hpp"
#include "meshmdp/io.hpp"
#include "meshmdp/kernels.hpp"
#include "meshmdp/lqg.hpp"
#include "meshmdp/mdp.hpp"
#include "meshmdp/numeric.hpp"
#include "meshmdp/oracles.hpp"
#include "meshmdp/parallel.hpp"
#include "meshmdp/policy.hpp"
#include "meshmdp/rng.hpp"
#include "meshmdp/solver.hpp"
