#pragma once

#include "rmhc/engine.hpp"
#include "rmhc/harness.hpp"
#include "rmhc/onemax.hpp"
#include "rmhc/rng.hpp"
#include "rmhc/theory.hpp"
