#pragma once

#include "am/errors.hpp"
#include "am/vector_ops.hpp"
#include "am/geometry.hpp"
#include "am/domain_scaler.hpp"
#include "am/kd_tree.hpp"
#include "am/csv.hpp"
#include "am/sample_set.hpp"
#include "am/models.hpp"
#include "am/manifold.hpp"
#include "am/spline.hpp"
#include "am/parallel.hpp"
#include "am/projector.hpp"
#include "am/active_subspace.hpp"
#include "am/sensitivity.hpp"
#include "am/experiment.hpp"
