#pragma once

#include "hopcirc/lowering/gadgets.hpp"
#include "hopcirc/lowering/scalar.hpp"
#include "hopcirc/lowering/construct.hpp"
#include "hopcirc/lowering/network.hpp"
#include "hopcirc/lowering/formula.hpp"
#include "hopcirc/lowering/verify.hpp"
