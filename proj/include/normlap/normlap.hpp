#pragma once

#include "normlap/error.hpp"
#include "normlap/norms.hpp"
#include "normlap/wavelets.hpp"
#include "normlap/laplacian.hpp"
#include "normlap/spectral.hpp"
#include "normlap/limit_op.hpp"
#include "normlap/fd_eigen.hpp"
#include "normlap/dataset.hpp"
