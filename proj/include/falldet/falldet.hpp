#pragma once

#include "config_file.hpp"
#include "detector.hpp"
#include "evaluation.hpp"
#include "geometry.hpp"
#include "pose_stream.hpp"
