#pragma once

#include "stbc/channel.hpp"
#include "stbc/dispersion.hpp"
#include "stbc/error.hpp"
#include "stbc/experiments.hpp"
#include "stbc/infotheory.hpp"
#include "stbc/parallel.hpp"
#include "stbc/quadrature.hpp"
#include "stbc/rational.hpp"
#include "stbc/rng.hpp"
#include "stbc/text_format.hpp"
