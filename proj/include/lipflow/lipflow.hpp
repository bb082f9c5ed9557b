#pragma once

#include "lipflow/barrier.hpp"
#include "lipflow/boundary.hpp"
#include "lipflow/checks.hpp"
#include "lipflow/config.hpp"
#include "lipflow/error.hpp"
#include "lipflow/geometry.hpp"
#include "lipflow/integrand.hpp"
#include "lipflow/io.hpp"
#include "lipflow/mesh.hpp"
#include "lipflow/mollify.hpp"
#include "lipflow/solver.hpp"
#include "lipflow/vec.hpp"
