#pragma once

// Umbrella header for the sum-of-minimum optimization library.

#include "adam.hpp"
#include "common.hpp"
#include "core.hpp"
#include "datagen.hpp"
#include "diagnostics.hpp"
#include "experiments.hpp"
#include "gpca.hpp"
#include "init.hpp"
#include "linalg.hpp"
#include "lloyd.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "momentum.hpp"
#include "rng.hpp"
