#pragma once

// Umbrella header.

#include "pbound/cache.hpp"
#include "pbound/common.hpp"
#include "pbound/decomp.hpp"
#include "pbound/domain.hpp"
#include "pbound/energy_model.hpp"
#include "pbound/exact_bound.hpp"
#include "pbound/fold.hpp"
#include "pbound/loops.hpp"
#include "pbound/motif.hpp"
#include "pbound/record.hpp"
#include "pbound/rivals.hpp"
#include "pbound/runner.hpp"
#include "pbound/sequence.hpp"
#include "pbound/structure.hpp"
