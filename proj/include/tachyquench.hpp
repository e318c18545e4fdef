#pragma once

#include "tachyquench/errors.hpp"
#include "tachyquench/quench_core.hpp"
#include "tachyquench/lattice_model.hpp"
#include "tachyquench/experiment_result.hpp"
#include "tachyquench/parallel.hpp"
#include "tachyquench/correlators.hpp"
#include "tachyquench/gaussian_info.hpp"
#include "tachyquench/symplectic_oracle.hpp"
#include "tachyquench/lr_bounds.hpp"
#include "tachyquench/experiments.hpp"
