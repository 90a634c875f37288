#pragma once

#include "nego/domain.hpp"
#include "nego/domain_io.hpp"
#include "nego/game.hpp"
#include "nego/gp.hpp"
#include "nego/ne_check.hpp"
#include "nego/opponent_model.hpp"
#include "nego/protocol.hpp"
#include "nego/rng.hpp"
#include "nego/spec.hpp"
#include "nego/strategies.hpp"
#include "nego/tournament.hpp"
