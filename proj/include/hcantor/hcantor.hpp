#pragma once

#include "hcantor/affine_map.hpp"
#include "hcantor/branch_system.hpp"
#include "hcantor/conjugacy.hpp"
#include "hcantor/distortion.hpp"
#include "hcantor/error.hpp"
#include "hcantor/interval.hpp"
#include "hcantor/return_rigidity.hpp"
#include "hcantor/scalar.hpp"
#include "hcantor/symbolic.hpp"
#include "hcantor/word.hpp"
