#pragma once

#include "estimation.hpp"
#include "evolution.hpp"
#include "inputs.hpp"
#include "lattice.hpp"
#include "montecarlo.hpp"
#include "observables.hpp"
#include "state.hpp"
#include "twowalker.hpp"
