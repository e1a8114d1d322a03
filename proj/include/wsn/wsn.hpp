#pragma once

#include "wsn/config.hpp"
#include "wsn/csv.hpp"
#include "wsn/energy.hpp"
#include "wsn/fuzzy.hpp"
#include "wsn/network.hpp"
#include "wsn/protocol.hpp"
#include "wsn/rng.hpp"
#include "wsn/sim.hpp"
