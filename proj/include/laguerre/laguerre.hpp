#pragma once

#include "laguerre/errors.hpp"
#include "laguerre/lorentz.hpp"
#include "laguerre/spheres.hpp"
#include "laguerre/group.hpp"
#include "laguerre/jet.hpp"
#include "laguerre/grid.hpp"
#include "laguerre/surfaces.hpp"
#include "laguerre/hypersurface.hpp"
#include "laguerre/minimality.hpp"
#include "laguerre/spaceforms.hpp"
