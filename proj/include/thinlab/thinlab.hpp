#pragma once

// Umbrella header: the whole library in dependency order.

#include "summation.hpp"
#include "dyadic.hpp"
#include "disk_geometry.hpp"
#include "weights.hpp"
#include "levels.hpp"
#include "series_engine.hpp"
#include "constructions.hpp"
#include "witnesses.hpp"
#include "classifier.hpp"
#include "io.hpp"
