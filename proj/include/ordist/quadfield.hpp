#pragma once

#include "ordist/quadfield/field.hpp"
#include "ordist/quadfield/residues.hpp"
