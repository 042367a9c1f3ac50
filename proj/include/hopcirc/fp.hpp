#pragma once

#include "hopcirc/fp/arith.hpp"
#include "hopcirc/fp/num.hpp"
#include "hopcirc/fp/rounding.hpp"
#include "hopcirc/fp/transcendental.hpp"
