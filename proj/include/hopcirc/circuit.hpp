#pragma once

#include "hopcirc/circuit/builder.hpp"
#include "hopcirc/circuit/circuit.hpp"
#include "hopcirc/circuit/depth.hpp"
#include "hopcirc/circuit/encoding.hpp"
#include "hopcirc/circuit/netlist.hpp"
