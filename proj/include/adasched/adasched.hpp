#pragma once

#include "adasched/batch.hpp"
#include "adasched/error.hpp"
#include "adasched/experiment.hpp"
#include "adasched/guidance.hpp"
#include "adasched/importance.hpp"
#include "adasched/metrics.hpp"
#include "adasched/mixture.hpp"
#include "adasched/noise_schedule.hpp"
#include "adasched/postprocess.hpp"
#include "adasched/rng.hpp"
#include "adasched/sampler.hpp"
#include "adasched/schedule_builder.hpp"
