// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sgdice/box_optimizer.hpp"
#include "sgdice/calibration.hpp"
#include "sgdice/climate.hpp"
#include "sgdice/economy.hpp"
#include "sgdice/errors.hpp"
#include "sgdice/metrics.hpp"
#include "sgdice/optimizer.hpp"
#include "sgdice/params.hpp"
#include "sgdice/params_io.hpp"
#include "sgdice/runner.hpp"
#include "sgdice/scenario.hpp"
#include "sgdice/simulate.hpp"
#include "sgdice/solution.hpp"
