#pragma once

#include "qdpa/baselines.hpp"
#include "qdpa/channel.hpp"
#include "qdpa/common.hpp"
#include "qdpa/complexity.hpp"
#include "qdpa/harness.hpp"
#include "qdpa/learning.hpp"
#include "qdpa/mdp.hpp"
#include "qdpa/report.hpp"
#include "qdpa/reward.hpp"
#include "qdpa/serialize.hpp"
#include "qdpa/stats.hpp"
#include "qdpa/topology.hpp"
