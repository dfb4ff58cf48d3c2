#pragma once

// Incidence laboratory: homogeneous point sets, regular hypersurface families,
// delta-thickened incidence counting, discrete s-energy and surface-measure
// decay checks.

#include "incilab/energy.hpp"
#include "incilab/experiment.hpp"
#include "incilab/families.hpp"
#include "incilab/fit.hpp"
#include "incilab/fourier.hpp"
#include "incilab/homogeneity.hpp"
#include "incilab/incidence.hpp"
#include "incilab/parallel.hpp"
#include "incilab/point_set.hpp"
#include "incilab/regularity.hpp"
#include "incilab/rng.hpp"
#include "incilab/vec.hpp"
