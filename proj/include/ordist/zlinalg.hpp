#pragma once

#include "ordist/zlinalg/ab_group.hpp"
#include "ordist/zlinalg/int_matrix.hpp"
#include "ordist/zlinalg/lattice.hpp"
#include "ordist/zlinalg/matrix_io.hpp"
#include "ordist/zlinalg/modular.hpp"
#include "ordist/zlinalg/normal_form.hpp"
#include "ordist/zlinalg/presentation.hpp"
