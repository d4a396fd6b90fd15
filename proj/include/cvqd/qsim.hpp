#pragma once

#include "qsim/circuit.hpp"
#include "qsim/matrix.hpp"
#include "qsim/ops.hpp"
#include "qsim/pauli.hpp"
#include "qsim/state.hpp"
