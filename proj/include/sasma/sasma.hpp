#pragma once

// Umbrella header for the sasma library.

#include "sasma/conditions.hpp"
#include "sasma/config.hpp"
#include "sasma/error.hpp"
#include "sasma/estimate.hpp"
#include "sasma/io.hpp"
#include "sasma/kernel.hpp"
#include "sasma/lepage.hpp"
#include "sasma/levy.hpp"
#include "sasma/montecarlo.hpp"
#include "sasma/rng.hpp"
#include "sasma/scale.hpp"
#include "sasma/simulate.hpp"
#include "sasma/spectral.hpp"
#include "sasma/stable.hpp"
