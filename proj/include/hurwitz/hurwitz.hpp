#pragma once

#include "hurwitz/errors.hpp"
#include "hurwitz/scalar.hpp"
#include "hurwitz/matrix.hpp"
#include "hurwitz/algebra.hpp"
#include "hurwitz/linear_maps.hpp"
#include "hurwitz/random.hpp"
#include "hurwitz/triality.hpp"
#include "hurwitz/isotope.hpp"
#include "hurwitz/quaternion.hpp"
#include "hurwitz/composition.hpp"
