#pragma once

// Umbrella header: the whole public surface in one include.

#include "arhmm/core.hpp"
#include "arhmm/decode.hpp"
#include "arhmm/dists.hpp"
#include "arhmm/errors.hpp"
#include "arhmm/fit.hpp"
#include "arhmm/geometry.hpp"
#include "arhmm/io.hpp"
#include "arhmm/likelihood.hpp"
#include "arhmm/model.hpp"
#include "arhmm/optim.hpp"
#include "arhmm/rng.hpp"
#include "arhmm/simulate.hpp"
#include "arhmm/special.hpp"
