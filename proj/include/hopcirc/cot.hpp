#pragma once

#include "hopcirc/cot/mhm.hpp"
