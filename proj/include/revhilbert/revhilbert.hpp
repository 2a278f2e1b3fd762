#pragma once

#include "revhilbert/error.hpp"
#include "revhilbert/numerics.hpp"
#include "revhilbert/hilbert.hpp"
#include "revhilbert/kernel_approx.hpp"
#include "revhilbert/optimality.hpp"
