#pragma once

#include "peakcast/baselines.hpp"
#include "peakcast/battery.hpp"
#include "peakcast/calendar.hpp"
#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/lstm.hpp"
#include "peakcast/metrics.hpp"
#include "peakcast/model_io.hpp"
#include "peakcast/peak_labeler.hpp"
#include "peakcast/trace.hpp"
#include "peakcast/training.hpp"
