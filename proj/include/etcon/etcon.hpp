#pragma once

#include "graph.hpp"
#include "synthesis.hpp"
#include "protocol.hpp"
#include "simulator.hpp"
#include "metrics.hpp"
#include "scenario.hpp"
#include "plots.hpp"
