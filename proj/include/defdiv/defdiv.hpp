#pragma once

#include "defdiv/core.hpp"
#include "defdiv/deformed_exp.hpp"
#include "defdiv/divergences.hpp"
#include "defdiv/existence.hpp"
#include "defdiv/io.hpp"
#include "defdiv/kappa_solver.hpp"
#include "defdiv/measures.hpp"
