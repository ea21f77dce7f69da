#pragma once

#include "macwt/channel.hpp"
#include "macwt/codec.hpp"
#include "macwt/errors.hpp"
#include "macwt/fading.hpp"
#include "macwt/format.hpp"
#include "macwt/information.hpp"
#include "macwt/leakage.hpp"
#include "macwt/protocol.hpp"
#include "macwt/random.hpp"
#include "macwt/rate_region.hpp"
#include "macwt/runner.hpp"
#include "macwt/scenario.hpp"
