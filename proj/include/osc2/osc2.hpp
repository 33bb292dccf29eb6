#pragma once

#include "osc2/core.hpp"
#include "osc2/model.hpp"
#include "osc2/derivatives.hpp"
#include "osc2/connections.hpp"
#include "osc2/dynamics.hpp"
#include "osc2/models.hpp"
#include "osc2/config.hpp"
#include "osc2/verify.hpp"
