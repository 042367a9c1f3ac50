#pragma once

#include "hopcirc/linalg/matrix.hpp"
#include "hopcirc/linalg/ops.hpp"
