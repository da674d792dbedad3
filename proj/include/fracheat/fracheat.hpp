#pragma once

#include "errors.hpp"
#include "grid.hpp"
#include "spectral.hpp"
#include "norms.hpp"
#include "kernel.hpp"
#include "hs_distance.hpp"
#include "rate_fit.hpp"
#include "parallel.hpp"
#include "solver.hpp"
#include "lab.hpp"
#include "config.hpp"
#include "report.hpp"
