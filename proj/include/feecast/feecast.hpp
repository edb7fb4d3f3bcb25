#pragma once

#include "feecast/config.hpp"
#include "feecast/dataset.hpp"
#include "feecast/error.hpp"
#include "feecast/eval.hpp"
#include "feecast/features.hpp"
#include "feecast/gbm.hpp"
#include "feecast/hybrid.hpp"
#include "feecast/ingest.hpp"
#include "feecast/numerics.hpp"
#include "feecast/prep.hpp"
#include "feecast/report.hpp"
#include "feecast/sarimax.hpp"
#include "feecast/stats.hpp"
#include "feecast/synthetic.hpp"
#include "feecast/time2vec.hpp"
#include "feecast/trend.hpp"
