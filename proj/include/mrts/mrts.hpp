#pragma once

#include "mrts/chains.hpp"
#include "mrts/coalescent.hpp"
#include "mrts/enumerator.hpp"
#include "mrts/error.hpp"
#include "mrts/fmatrix.hpp"
#include "mrts/lattice.hpp"
#include "mrts/rng.hpp"
#include "mrts/serialize.hpp"
#include "mrts/statistics.hpp"
#include "mrts/string_repr.hpp"
#include "mrts/tree_shape.hpp"
