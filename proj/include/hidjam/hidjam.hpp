#pragma once

#include "hidjam/types.hpp"
#include "hidjam/spectrum.hpp"
#include "hidjam/hiding_metric.hpp"
#include "hidjam/jammers.hpp"
#include "hidjam/state_matrix.hpp"
#include "hidjam/dqn/network.hpp"
#include "hidjam/dqn/replay.hpp"
#include "hidjam/dqn/trainer.hpp"
#include "hidjam/dqn/checkpoint.hpp"
#include "hidjam/user_policies.hpp"
#include "hidjam/arena.hpp"
#include "hidjam/metrics.hpp"
#include "hidjam/config.hpp"
#include "hidjam/experiment.hpp"
