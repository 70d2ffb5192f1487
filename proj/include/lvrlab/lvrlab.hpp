#pragma once
// Umbrella header.

#include "lvrlab/analytics.hpp"
#include "lvrlab/arb_engine.hpp"
#include "lvrlab/book_depth.hpp"
#include "lvrlab/cost_models.hpp"
#include "lvrlab/curves.hpp"
#include "lvrlab/errors.hpp"
#include "lvrlab/experiment.hpp"
#include "lvrlab/io.hpp"
#include "lvrlab/numeric.hpp"
#include "lvrlab/price_dynamics.hpp"
#include "lvrlab/version.hpp"
