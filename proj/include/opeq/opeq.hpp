#pragma once

#include "opeq/construction.hpp"
#include "opeq/equation.hpp"
#include "opeq/errors.hpp"
#include "opeq/inequalities.hpp"
#include "opeq/matrix_io.hpp"
#include "opeq/psd.hpp"
#include "opeq/random.hpp"
#include "opeq/search.hpp"
#include "opeq/spectral.hpp"
#include "opeq/suites.hpp"
#include "opeq/sym_matrix.hpp"
#include "opeq/tolerance.hpp"
#include "opeq/version.hpp"
