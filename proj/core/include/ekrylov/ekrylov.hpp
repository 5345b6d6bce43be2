#pragma once

#include "ekrylov/chain.hpp"
#include "ekrylov/csv_io.hpp"
#include "ekrylov/errors.hpp"
#include "ekrylov/metrics.hpp"
#include "ekrylov/oracle.hpp"
#include "ekrylov/propagate.hpp"
#include "ekrylov/recursion.hpp"
#include "ekrylov/spectra.hpp"
