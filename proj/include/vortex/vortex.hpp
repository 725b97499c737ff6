#pragma once

#include "vortex/constants.hpp"
#include "vortex/geometry.hpp"
#include "vortex/spectra.hpp"
#include "vortex/coherent.hpp"
#include "vortex/functionals.hpp"
#include "vortex/dynamics.hpp"
#include "vortex/json_io.hpp"
#include "vortex/pipeline.hpp"
