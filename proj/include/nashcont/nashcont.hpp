#ifndef NASHCONT_NASHCONT_HPP
#define NASHCONT_NASHCONT_HPP

#include "nashcont/game.hpp"
#include "nashcont/polynomial.hpp"
#include "nashcont/system_e.hpp"
#include "nashcont/rational.hpp"
#include "nashcont/start_system.hpp"
#include "nashcont/start_library.hpp"
#include "nashcont/homotopy.hpp"
#include "nashcont/nash.hpp"
#include "nashcont/phc_format.hpp"
#include "nashcont/game_file.hpp"

#endif  // NASHCONT_NASHCONT_HPP
