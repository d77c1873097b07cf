#pragma once

// Umbrella header: the full causal scoring toolkit.

#include "csl/dataset.hpp"
#include "csl/dgp.hpp"
#include "csl/errors.hpp"
#include "csl/gbdt.hpp"
#include "csl/interpret.hpp"
#include "csl/matrix.hpp"
#include "csl/metrics.hpp"
#include "csl/mvn.hpp"
#include "csl/normal.hpp"
#include "csl/ridge.hpp"
#include "csl/rng.hpp"
#include "csl/scoring.hpp"
#include "csl/version.hpp"

// Artifact plumbing (CSV/JSON/SVG) and the command line front end live in
// csl/dataio.hpp, csl/svg.hpp, and csl/cli.hpp; include them separately to
// keep the core toolkit free of vendor dependencies.
