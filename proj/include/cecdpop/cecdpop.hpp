#pragma once

#include "cecdpop/bench.hpp"
#include "cecdpop/consistency.hpp"
#include "cecdpop/error.hpp"
#include "cecdpop/generators.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/io.hpp"
#include "cecdpop/matrix.hpp"
#include "cecdpop/oracle.hpp"
#include "cecdpop/propagation.hpp"
#include "cecdpop/pseudotree.hpp"
#include "cecdpop/simulator.hpp"
#include "cecdpop/solver.hpp"
#include "cecdpop/util_table.hpp"
#include "cecdpop/verify.hpp"
#include "cecdpop/view.hpp"
