#pragma once

// Umbrella header.

#include "mnpmc/channel.hpp"
#include "mnpmc/channel_analytic.hpp"
#include "mnpmc/channel_sim.hpp"
#include "mnpmc/constants.hpp"
#include "mnpmc/experiment.hpp"
#include "mnpmc/fd_reference.hpp"
#include "mnpmc/integrate.hpp"
#include "mnpmc/link.hpp"
#include "mnpmc/physics.hpp"
#include "mnpmc/rng.hpp"
#include "mnpmc/validation.hpp"
