#pragma once

#include "arith.hpp"
#include "charfun.hpp"
#include "cumulant.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "random_model.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "version.hpp"
#include "zeta_line.hpp"
