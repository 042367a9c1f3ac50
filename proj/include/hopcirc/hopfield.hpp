#pragma once

#include "hopcirc/hopfield/layer.hpp"
#include "hopcirc/hopfield/network.hpp"
#include "hopcirc/hopfield/random.hpp"
#include "hopcirc/hopfield/retrieval.hpp"
#include "hopcirc/kernel/kernel.hpp"
