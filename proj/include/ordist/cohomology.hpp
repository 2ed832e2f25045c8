#pragma once

#include "ordist/cohomology/cyclic.hpp"
#include "ordist/cohomology/frame.hpp"
