#pragma once

// Krylov subspace approximation of f(A) v for f in {exp, cos, sin}, with the
// a posteriori error estimates xi_1 / xi_2, truncated error expansions, and
// explicit upper bounds that certify convergence.

#include "kryfun/artifacts.hpp"
#include "kryfun/bounds.hpp"
#include "kryfun/dense_funm.hpp"
#include "kryfun/divided_difference.hpp"
#include "kryfun/estimates.hpp"
#include "kryfun/function_spec.hpp"
#include "kryfun/krylov.hpp"
#include "kryfun/lognorm.hpp"
#include "kryfun/matrix_market.hpp"
#include "kryfun/oracle.hpp"
#include "kryfun/prng.hpp"
#include "kryfun/record.hpp"
#include "kryfun/restart.hpp"
#include "kryfun/run.hpp"
#include "kryfun/run_bounds.hpp"
#include "kryfun/sparse.hpp"
#include "kryfun/types.hpp"
