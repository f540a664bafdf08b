#pragma once

// Umbrella header.
#include "logbarrier/attack.hpp"
#include "logbarrier/baselines.hpp"
#include "logbarrier/classifier.hpp"
#include "logbarrier/dataset.hpp"
#include "logbarrier/errors.hpp"
#include "logbarrier/evaluation.hpp"
#include "logbarrier/model_io.hpp"
#include "logbarrier/oracle.hpp"
#include "logbarrier/parallel.hpp"
#include "logbarrier/perturbation.hpp"
#include "logbarrier/report.hpp"
#include "logbarrier/trainer.hpp"
#include "logbarrier/types.hpp"
