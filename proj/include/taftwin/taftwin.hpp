#pragma once

// Convenience header pulling in every module of the kernel.

#include "taftwin/core/error.hpp"
#include "taftwin/core/geo.hpp"
#include "taftwin/core/json_io.hpp"
#include "taftwin/core/network.hpp"
#include "taftwin/core/polyline.hpp"
#include "taftwin/core/route.hpp"
#include "taftwin/core/types.hpp"

#include "taftwin/procgen/cross_section.hpp"
#include "taftwin/procgen/pattern.hpp"
#include "taftwin/procgen/sampler.hpp"
#include "taftwin/procgen/scene.hpp"

#include "taftwin/behavior/driver.hpp"
#include "taftwin/behavior/obstacle.hpp"
#include "taftwin/behavior/pedestrian.hpp"

#include "taftwin/signals/controller.hpp"
#include "taftwin/signals/lost_time.hpp"
#include "taftwin/signals/model_check.hpp"
#include "taftwin/signals/program.hpp"
#include "taftwin/signals/program_io.hpp"

#include "taftwin/cosim/barrier.hpp"
#include "taftwin/cosim/client.hpp"
#include "taftwin/cosim/kernel.hpp"
#include "taftwin/cosim/message.hpp"
#include "taftwin/cosim/model.hpp"
#include "taftwin/cosim/ownership.hpp"
#include "taftwin/cosim/recording.hpp"
#include "taftwin/cosim/server.hpp"
#include "taftwin/cosim/socket.hpp"

#include "taftwin/ingest/fusion.hpp"
#include "taftwin/ingest/homography.hpp"
#include "taftwin/ingest/object_list.hpp"
#include "taftwin/ingest/pipeline.hpp"
#include "taftwin/ingest/tracker.hpp"

#include "taftwin/v2x/messages.hpp"
#include "taftwin/v2x/misbehavior.hpp"
#include "taftwin/v2x/threats.hpp"

#include "taftwin/scenario/config.hpp"
#include "taftwin/scenario/experiment.hpp"
#include "taftwin/scenario/runner.hpp"
#include "taftwin/scenario/security.hpp"
#include "taftwin/scenario/world.hpp"
