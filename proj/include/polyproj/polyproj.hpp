#pragma once
// Core library; io.hpp and cli.hpp additionally need the vendored JSON and CLI11 headers.

#include "polyproj/bench.hpp"
#include "polyproj/cls.hpp"
#include "polyproj/error.hpp"
#include "polyproj/escape.hpp"
#include "polyproj/image.hpp"
#include "polyproj/linalg.hpp"
#include "polyproj/oracle.hpp"
#include "polyproj/polyhedron.hpp"
