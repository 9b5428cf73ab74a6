#pragma once

#include "jade/adversary.hpp"
#include "jade/engine.hpp"
#include "jade/experiment.hpp"
#include "jade/jam.hpp"
#include "jade/metrics.hpp"
#include "jade/oracle.hpp"
#include "jade/protocol.hpp"
#include "jade/rng.hpp"
#include "jade/topology.hpp"
#include "jade/trace.hpp"
