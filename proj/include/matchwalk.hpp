#pragma once

#include "matchwalk/augmenting.hpp"
#include "matchwalk/blossom.hpp"
#include "matchwalk/certify.hpp"
#include "matchwalk/corpus.hpp"
#include "matchwalk/error.hpp"
#include "matchwalk/exact.hpp"
#include "matchwalk/flow.hpp"
#include "matchwalk/gadget.hpp"
#include "matchwalk/generators.hpp"
#include "matchwalk/graph.hpp"
#include "matchwalk/influence.hpp"
#include "matchwalk/matching.hpp"
#include "matchwalk/rational.hpp"
#include "matchwalk/rng.hpp"
#include "matchwalk/short_paths.hpp"
#include "matchwalk/state_space.hpp"
#include "matchwalk/sym_diff.hpp"
#include "matchwalk/walk.hpp"
