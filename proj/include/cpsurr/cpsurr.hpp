#pragma once

#include "cpsurr/butterworth.hpp"
#include "cpsurr/changepoint.hpp"
#include "cpsurr/features.hpp"
#include "cpsurr/fft.hpp"
#include "cpsurr/iaaft.hpp"
#include "cpsurr/metrics.hpp"
#include "cpsurr/peaks.hpp"
#include "cpsurr/pipeline.hpp"
#include "cpsurr/signal.hpp"
