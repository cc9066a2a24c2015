#pragma once

#include "qtherm/thermal_model.hpp"
#include "qtherm/grid.hpp"
#include "qtherm/priors.hpp"
#include "qtherm/posterior.hpp"
#include "qtherm/estimators.hpp"
#include "qtherm/sensitivity.hpp"
#include "qtherm/global_metrics.hpp"
