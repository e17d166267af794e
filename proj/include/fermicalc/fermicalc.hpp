#pragma once

#include "bbf.hpp"
#include "bounds.hpp"
#include "connected.hpp"
#include "gaussian.hpp"
#include "grassmann.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "norms.hpp"
#include "resummation.hpp"
#include "scalar.hpp"
#include "spoly.hpp"
#include "trees.hpp"
