#pragma once

// Umbrella header.

#include "esc/analysis.hpp"
#include "esc/closed_loop.hpp"
#include "esc/config.hpp"
#include "esc/controller.hpp"
#include "esc/csv.hpp"
#include "esc/dither.hpp"
#include "esc/filters.hpp"
#include "esc/format.hpp"
#include "esc/heat_solver.hpp"
#include "esc/manifest.hpp"
#include "esc/quadrature.hpp"
#include "esc/svg_plot.hpp"
