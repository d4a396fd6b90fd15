#pragma once

#include "game/estimate.hpp"
#include "game/protocol.hpp"
#include "game/provers.hpp"
#include "game/setup.hpp"
#include "game/solver.hpp"
#include "game/transcript.hpp"
