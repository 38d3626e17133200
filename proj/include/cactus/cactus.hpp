#pragma once

#include "cactus/rational.hpp"
#include "cactus/scalar.hpp"
#include "cactus/metric.hpp"
#include "cactus/graph.hpp"
#include "cactus/cycle.hpp"
#include "cactus/decomposition.hpp"
#include "cactus/realization.hpp"
#include "cactus/generators.hpp"
#include "cactus/io.hpp"
