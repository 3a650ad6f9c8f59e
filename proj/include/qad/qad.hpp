#pragma once

#include "qad/checkerboard.hpp"
#include "qad/correlation.hpp"
#include "qad/data_table.hpp"
#include "qad/empirical_copula.hpp"
#include "qad/error.hpp"
#include "qad/estimator.hpp"
#include "qad/metrics.hpp"
#include "qad/network.hpp"
#include "qad/pairwise.hpp"
#include "qad/parallel.hpp"
#include "qad/predictor.hpp"
#include "qad/random.hpp"
#include "qad/sample.hpp"
#include "qad/sims.hpp"
