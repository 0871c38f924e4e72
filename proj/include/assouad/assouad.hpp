#pragma once

#include "assouad/errors.hpp"
#include "assouad/families.hpp"
#include "assouad/growth.hpp"
#include "assouad/io.hpp"
#include "assouad/moran.hpp"
#include "assouad/nonmonotone.hpp"
#include "assouad/parallel.hpp"
#include "assouad/spectrum.hpp"
#include "assouad/svg.hpp"
#include "assouad/validation.hpp"
