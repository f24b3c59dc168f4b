#pragma once

// Individual-fairness testing toolkit for small feedforward classifiers:
// fairness-related neuron selection, multi-granularity adequacy metrics with
// bin coverage, unfair-pair generation, and metric-stratified test selection
// for augmented retraining.

#include "fairtest/commands.hpp"
#include "fairtest/coverage.hpp"
#include "fairtest/dataset.hpp"
#include "fairtest/enhancement.hpp"
#include "fairtest/errors.hpp"
#include "fairtest/generation.hpp"
#include "fairtest/gradients.hpp"
#include "fairtest/metrics.hpp"
#include "fairtest/model.hpp"
#include "fairtest/model_io.hpp"
#include "fairtest/mutation.hpp"
#include "fairtest/neuron_selection.hpp"
#include "fairtest/parallel.hpp"
#include "fairtest/rank_stats.hpp"
#include "fairtest/selection.hpp"
#include "fairtest/synthetic.hpp"
#include "fairtest/train.hpp"
#include "fairtest/transform.hpp"
