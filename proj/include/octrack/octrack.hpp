#pragma once

// Umbrella header for the octrack library.
#include "octrack/assignment.hpp"
#include "octrack/association.hpp"
#include "octrack/geometry.hpp"
#include "octrack/kalman.hpp"
#include "octrack/metrics.hpp"
#include "octrack/mot_io.hpp"
#include "octrack/noise_lab.hpp"
#include "octrack/postprocess.hpp"
#include "octrack/random.hpp"
#include "octrack/tracker.hpp"
