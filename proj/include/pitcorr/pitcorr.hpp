#pragma once

#include "pitcorr/analysis.hpp"
#include "pitcorr/boundary.hpp"
#include "pitcorr/correction.hpp"
#include "pitcorr/errors.hpp"
#include "pitcorr/grid.hpp"
#include "pitcorr/holes.hpp"
#include "pitcorr/laplacian.hpp"
#include "pitcorr/mask.hpp"
#include "pitcorr/model.hpp"
#include "pitcorr/rect.hpp"
#include "pitcorr/spectral.hpp"
#include "pitcorr/state.hpp"
