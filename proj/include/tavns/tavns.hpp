#pragma once

#include "tavns/errors.hpp"
#include "tavns/field.hpp"
#include "tavns/harness.hpp"
#include "tavns/io.hpp"
#include "tavns/langevin.hpp"
#include "tavns/parallel.hpp"
#include "tavns/qwiener.hpp"
#include "tavns/rng.hpp"
#include "tavns/scheme.hpp"
#include "tavns/spectral.hpp"
