#pragma once

// Inference on the Weibull parameters from upper record values.

#include "wrec/distributions.hpp"
#include "wrec/error.hpp"
#include "wrec/numeric.hpp"
#include "wrec/records.hpp"
#include "wrec/region.hpp"
#include "wrec/report.hpp"
#include "wrec/rng.hpp"
#include "wrec/scale.hpp"
#include "wrec/shape.hpp"
#include "wrec/simulation.hpp"
#include "wrec/special.hpp"
