#pragma once

#include "cwm/core/basis.hpp"
#include "cwm/core/density.hpp"
#include "cwm/core/matrix.hpp"
#include "cwm/dynamics.hpp"
#include "cwm/estimator.hpp"
#include "cwm/harness/config.hpp"
#include "cwm/harness/io.hpp"
#include "cwm/harness/run.hpp"
#include "cwm/rng.hpp"
