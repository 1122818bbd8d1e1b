#pragma once

#include "stancedyn/ccm.hpp"
#include "stancedyn/classify.hpp"
#include "stancedyn/cohort.hpp"
#include "stancedyn/dynamics.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/mutual_info.hpp"
#include "stancedyn/stationarity.hpp"
#include "stancedyn/syngen.hpp"
#include "stancedyn/threads.hpp"
#include "stancedyn/topics.hpp"
#include "stancedyn/version.hpp"
