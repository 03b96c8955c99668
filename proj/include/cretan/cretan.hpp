#pragma once

// Umbrella header for the whole library.

#include "cretan/qfield.hpp"
#include "cretan/designs.hpp"
#include "cretan/cretan_matrix.hpp"
#include "cretan/numeric.hpp"
#include "cretan/io.hpp"
