#pragma once

#include "c3i/error.hpp"
#include "c3i/series.hpp"
#include "c3i/distributions.hpp"
#include "c3i/linalg.hpp"
#include "c3i/ols.hpp"
#include "c3i/pca.hpp"
#include "c3i/mackinnon.hpp"
#include "c3i/stationarity.hpp"
#include "c3i/causality.hpp"
#include "c3i/breaks.hpp"
#include "c3i/regression.hpp"
#include "c3i/diagnostics.hpp"
#include "c3i/model.hpp"
#include "c3i/csv.hpp"
#include "c3i/config.hpp"
#include "c3i/pipeline.hpp"
#include "c3i/report.hpp"
