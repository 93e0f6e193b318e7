#pragma once

#include "npdt/errors.hpp"
#include "npdt/measure.hpp"
#include "npdt/operator.hpp"
#include "npdt/model.hpp"
#include "npdt/counterexamples.hpp"
#include "npdt/stationary.hpp"
#include "npdt/reduction.hpp"
#include "npdt/conditions.hpp"
#include "npdt/krein.hpp"
#include "npdt/cs_estimator.hpp"
#include "npdt/stability.hpp"
#include "npdt/dynamics.hpp"
#include "npdt/hopf.hpp"
#include "npdt/model_io.hpp"
#include "npdt/report_json.hpp"
