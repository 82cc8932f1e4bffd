#pragma once

#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "norms.hpp"
#include "ops.hpp"
#include "products.hpp"
#include "random.hpp"
#include "lp/audit.hpp"
#include "lp/besov.hpp"
#include "lp/bony.hpp"
#include "lp/partition.hpp"
#include "hall/friedrichs.hpp"
#include "hall/solver.hpp"
#include "identities.hpp"
#include "io.hpp"
#include "inflation/lab.hpp"
#include "inflation/ns.hpp"
#include "inflation/profiles.hpp"
