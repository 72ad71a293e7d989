// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lemas/error.hpp"
#include "lemas/manifest.hpp"
#include "lemas/textnorm/normalize.hpp"
#include "lemas/textnorm/numbers.hpp"
#include "lemas/textnorm/pause.hpp"
#include "lemas/textnorm/profile.hpp"
#include "lemas/textnorm/romanize.hpp"
#include "lemas/aligner/emission.hpp"
#include "lemas/aligner/ctc.hpp"
#include "lemas/quality.hpp"
#include "lemas/curate.hpp"
#include "lemas/flowsched.hpp"
#include "lemas/editctl/penalty.hpp"
#include "lemas/editctl/regen.hpp"
#include "lemas/editctl/stitch.hpp"
#include "lemas/editctl/wav.hpp"
#include "lemas/pipeline/config.hpp"
#include "lemas/pipeline/parallel.hpp"
#include "lemas/pipeline/shard.hpp"
#include "lemas/pipeline/stages.hpp"
#include "lemas/pipeline/run.hpp"
