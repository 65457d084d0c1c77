#pragma once

#include "qdist/ansatz.hpp"
#include "qdist/circuit_passes.hpp"
#include "qdist/common.hpp"
#include "qdist/constraints.hpp"
#include "qdist/distribution.hpp"
#include "qdist/metrics.hpp"
#include "qdist/optimizer.hpp"
#include "qdist/sampling.hpp"
#include "qdist/serialization.hpp"
#include "qdist/simulator.hpp"
#include "qdist/targets.hpp"
