#pragma once

#include <doctest.h>

#include "gen.hpp"
