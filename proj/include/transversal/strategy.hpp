#pragma once

#include "transversal/strategy/common.hpp"
#include "transversal/strategy/engine.hpp"
#include "transversal/strategy/maker_breaker.hpp"
#include "transversal/strategy/prop2.hpp"
#include "transversal/strategy/theorem1.hpp"
