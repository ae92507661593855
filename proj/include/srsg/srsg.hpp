#pragma once

// Library umbrella. config.hpp is separate since it needs yaml-cpp.

#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"
#include "srsg/local_sim.hpp"
#include "srsg/agent_io.hpp"
#include "srsg/nn.hpp"
#include "srsg/ppo.hpp"
#include "srsg/context.hpp"
#include "srsg/data.hpp"
#include "srsg/parallel.hpp"
#include "srsg/policy.hpp"
#include "srsg/trainer.hpp"
#include "srsg/baselines.hpp"
