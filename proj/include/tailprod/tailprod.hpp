#pragma once

#include "tailprod/extended.hpp"
#include "tailprod/io.hpp"
#include "tailprod/lp_core.hpp"
#include "tailprod/marginals.hpp"
#include "tailprod/matrix.hpp"
#include "tailprod/quadrature.hpp"
#include "tailprod/rational.hpp"
#include "tailprod/rng.hpp"
#include "tailprod/simplex.hpp"
#include "tailprod/tail_analysis.hpp"
#include "tailprod/verification.hpp"
