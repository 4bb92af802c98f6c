#pragma once

#include "grantmatch/errors.hpp"
#include "grantmatch/fieldest.hpp"
#include "grantmatch/html.hpp"
#include "grantmatch/ingest.hpp"
#include "grantmatch/matching.hpp"
#include "grantmatch/mining.hpp"
#include "grantmatch/pipeline.hpp"
#include "grantmatch/rational.hpp"
#include "grantmatch/taxonomy.hpp"
#include "grantmatch/text.hpp"
#include "grantmatch/tokenizer.hpp"
