#pragma once

#include "ordist/distribution/certificate.hpp"
#include "ordist/distribution/presentation.hpp"
#include "ordist/distribution/torsion.hpp"
