#pragma once

#include "ivstat/distributions.hpp"
#include "ivstat/error.hpp"
#include "ivstat/estimation.hpp"
#include "ivstat/gof.hpp"
#include "ivstat/interval.hpp"
#include "ivstat/json.hpp"
#include "ivstat/linalg.hpp"
#include "ivstat/loss_risk.hpp"
#include "ivstat/model.hpp"
#include "ivstat/parallel.hpp"
#include "ivstat/rng.hpp"
#include "ivstat/simulation.hpp"
