#pragma once

#include "errors.hpp"
#include "expr.hpp"
#include "flnn.hpp"
#include "legendre_basis.hpp"
#include "problem.hpp"
#include "report.hpp"
#include "training.hpp"
#include "trial_solution.hpp"
