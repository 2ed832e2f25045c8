#pragma once

#include "ordist/rayclass/ray_class_group.hpp"
#include "ordist/rayclass/tower.hpp"
