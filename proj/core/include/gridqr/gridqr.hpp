#pragma once

#include "gridqr/baseline.hpp"
#include "gridqr/error.hpp"
#include "gridqr/householder.hpp"
#include "gridqr/matrix.hpp"
#include "gridqr/netsim.hpp"
#include "gridqr/perfmodel.hpp"
#include "gridqr/topology.hpp"
#include "gridqr/tree.hpp"
#include "gridqr/tsqr.hpp"
