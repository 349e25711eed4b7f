#pragma once

#include "errors.hpp"
#include "linalg.hpp"
#include "algebra.hpp"
#include "cp_map.hpp"
#include "random_instance.hpp"
#include "dilation.hpp"
#include "equivalence.hpp"
#include "io.hpp"
#include "fuzz.hpp"
