#pragma once

#include "hopcirc/problems/connectivity.hpp"
#include "hopcirc/problems/instance.hpp"
#include "hopcirc/problems/s5.hpp"
#include "hopcirc/problems/tree.hpp"
