#pragma once

#include "cstarloc/error.hpp"
#include "cstarloc/linalg.hpp"
#include "cstarloc/algebra.hpp"
#include "cstarloc/states.hpp"
#include "cstarloc/module.hpp"
#include "cstarloc/localization.hpp"
#include "cstarloc/separation.hpp"
