#pragma once

#include "covlab/config.hpp"
#include "covlab/continuum.hpp"
#include "covlab/discretization.hpp"
#include "covlab/distributions.hpp"
#include "covlab/divergence.hpp"
#include "covlab/errors.hpp"
#include "covlab/geometry.hpp"
#include "covlab/harness.hpp"
#include "covlab/interval.hpp"
#include "covlab/lattice.hpp"
#include "covlab/markov.hpp"
#include "covlab/parallel.hpp"
#include "covlab/random.hpp"
#include "covlab/stats.hpp"
