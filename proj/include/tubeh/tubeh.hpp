#pragma once

#include "tubeh/errors.hpp"
#include "tubeh/math.hpp"
#include "tubeh/fft.hpp"
#include "tubeh/cone_geometry.hpp"
#include "tubeh/grid_field.hpp"
#include "tubeh/grid_io.hpp"
#include "tubeh/kernels.hpp"
#include "tubeh/boundary_operators.hpp"
#include "tubeh/report.hpp"
#include "tubeh/bv_pipeline.hpp"
#include "tubeh/harness.hpp"
