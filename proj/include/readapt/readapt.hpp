#pragma once

#include "readapt/config.hpp"
#include "readapt/engine.hpp"
#include "readapt/errors.hpp"
#include "readapt/events.hpp"
#include "readapt/feature_graph.hpp"
#include "readapt/lexicon.hpp"
#include "readapt/mastery.hpp"
#include "readapt/planner.hpp"
#include "readapt/service.hpp"
#include "readapt/simulation.hpp"
#include "readapt/student_profile.hpp"
