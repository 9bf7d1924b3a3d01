#pragma once

// Umbrella header for the DatalogMTL reasoning library.

#include "dmtl/analysis.hpp"    // IWYU pragma: export
#include "dmtl/ast.hpp"         // IWYU pragma: export
#include "dmtl/bench.hpp"       // IWYU pragma: export
#include "dmtl/dataset.hpp"     // IWYU pragma: export
#include "dmtl/evaluation.hpp"  // IWYU pragma: export
#include "dmtl/generator.hpp"   // IWYU pragma: export
#include "dmtl/holding_set.hpp" // IWYU pragma: export
#include "dmtl/interval.hpp"    // IWYU pragma: export
#include "dmtl/oracle.hpp"      // IWYU pragma: export
#include "dmtl/parse.hpp"       // IWYU pragma: export
#include "dmtl/rational.hpp"    // IWYU pragma: export
#include "dmtl/reasoner.hpp"    // IWYU pragma: export
