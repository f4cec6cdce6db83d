#pragma once

#include "bounds.hpp"
#include "branching.hpp"
#include "config.hpp"
#include "ifs.hpp"
#include "interior.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "pressure.hpp"
#include "render.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "serialize.hpp"
#include "words.hpp"
