#pragma once

#include "tiltgest/calibration.hpp"
#include "tiltgest/classify.hpp"
#include "tiltgest/direction.hpp"
#include "tiltgest/engine.hpp"
#include "tiltgest/error.hpp"
#include "tiltgest/harness.hpp"
#include "tiltgest/mapping.hpp"
#include "tiltgest/preprocess.hpp"
#include "tiltgest/profiles.hpp"
#include "tiltgest/trace_io.hpp"
#include "tiltgest/vec3.hpp"
