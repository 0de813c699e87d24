#pragma once

// Umbrella header.

#include "ted/csv.hpp"
#include "ted/curation.hpp"
#include "ted/grouping.hpp"
#include "ted/lexicon.hpp"
#include "ted/parallel.hpp"
#include "ted/records.hpp"
#include "ted/scoring.hpp"
#include "ted/stats.hpp"
#include "ted/tokenizer.hpp"
#include "ted/types.hpp"
#include "ted/ued.hpp"
