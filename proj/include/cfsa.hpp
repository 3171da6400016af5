// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfsa/errors.hpp"
#include "cfsa/matrix_kernel.hpp"
#include "cfsa/gcs.hpp"
#include "cfsa/snapshot.hpp"
#include "cfsa/engine.hpp"
#include "cfsa/dmd.hpp"
#include "cfsa/pseudospectra.hpp"
#include "cfsa/wave.hpp"
#include "cfsa/io.hpp"
#include "cfsa/report.hpp"
