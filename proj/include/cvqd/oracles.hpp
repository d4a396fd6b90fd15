#pragma once

#include "oracles/inplace.hpp"
#include "oracles/prp.hpp"
#include "oracles/shuffling.hpp"
#include "oracles/simon.hpp"
