#pragma once

// Semi-supervised text regression: ensemble training with fold/seed
// fan-out, confidence-filtered pseudo-labeling, and expanded-dataset
// retraining, plus the evaluation tooling around it.

#include "selftrain/corpus.hpp"
#include "selftrain/dataset_io.hpp"
#include "selftrain/ensemble.hpp"
#include "selftrain/error.hpp"
#include "selftrain/features.hpp"
#include "selftrain/metrics.hpp"
#include "selftrain/model.hpp"
#include "selftrain/pipeline.hpp"
#include "selftrain/pseudolabel.hpp"
#include "selftrain/rng.hpp"
#include "selftrain/synthetic.hpp"
#include "selftrain/version.hpp"
