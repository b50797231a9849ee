#pragma once

#include "seglens/error.hpp"
#include "seglens/signal.hpp"
#include "seglens/io.hpp"
#include "seglens/embedding.hpp"
#include "seglens/cost.hpp"
#include "seglens/search.hpp"
#include "seglens/evaluation.hpp"
#include "seglens/synth.hpp"
