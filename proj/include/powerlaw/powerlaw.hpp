#pragma once

#include "powerlaw/bounds.hpp"
#include "powerlaw/graphgen.hpp"
#include "powerlaw/graphops.hpp"
#include "powerlaw/layers.hpp"
#include "powerlaw/model.hpp"
#include "powerlaw/parallel.hpp"
#include "powerlaw/report_io.hpp"
#include "powerlaw/rng.hpp"
