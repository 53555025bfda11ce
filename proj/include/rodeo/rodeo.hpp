#pragma once

// Library umbrella. The command-line layer (rodeo/cli.hpp) is separate
// because it pulls in CLI11.

#include "rodeo/autoencoder.hpp"
#include "rodeo/bench.hpp"
#include "rodeo/config.hpp"
#include "rodeo/cs_solvers.hpp"
#include "rodeo/degrade.hpp"
#include "rodeo/error.hpp"
#include "rodeo/fft.hpp"
#include "rodeo/image.hpp"
#include "rodeo/io.hpp"
#include "rodeo/l2_baseline.hpp"
#include "rodeo/linear_operator.hpp"
#include "rodeo/mask.hpp"
#include "rodeo/metrics.hpp"
#include "rodeo/model_io.hpp"
#include "rodeo/patches.hpp"
#include "rodeo/phantom.hpp"
#include "rodeo/pipeline.hpp"
#include "rodeo/radon.hpp"
#include "rodeo/rng.hpp"
#include "rodeo/sparsify.hpp"
#include "rodeo/split_bregman.hpp"
