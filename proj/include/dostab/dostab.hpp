// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dostab/charts.hpp"
#include "dostab/config.hpp"
#include "dostab/core.hpp"
#include "dostab/csv.hpp"
#include "dostab/error.hpp"
#include "dostab/io.hpp"
#include "dostab/ledger.hpp"
#include "dostab/metrics.hpp"
#include "dostab/rational.hpp"
#include "dostab/rng.hpp"
#include "dostab/sim.hpp"
#include "dostab/svg.hpp"
#include "dostab/triggers.hpp"
