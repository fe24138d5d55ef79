#ifndef SPANLINE_SPANLINE_HPP
#define SPANLINE_SPANLINE_HPP

#include "spancore.hpp"
#include "automaton.hpp"
#include "autops.hpp"
#include "regex.hpp"
#include "eval.hpp"
#include "json_io.hpp"
#include "domination.hpp"
#include "skyline.hpp"
#include "nrobp.hpp"
#include "genbench.hpp"

#endif  // SPANLINE_SPANLINE_HPP
