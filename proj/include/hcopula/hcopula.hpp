#pragma once

// Umbrella header for the hcopula library: consistent copula families on
// infinite-dimensional Hilbert spaces via truncation, pushforward sampling by
// Kolmogorov extension, and the associated diagnostics.

#include "hcopula/batch.hpp"
#include "hcopula/copula_families.hpp"
#include "hcopula/diagnostics.hpp"
#include "hcopula/io.hpp"
#include "hcopula/numerics.hpp"
#include "hcopula/pair_copulas.hpp"
#include "hcopula/parallel.hpp"
#include "hcopula/product_measures.hpp"
#include "hcopula/pushforward.hpp"
#include "hcopula/rng.hpp"
