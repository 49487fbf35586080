#pragma once

#include "splitrec/cavity_chain.hpp"
#include "splitrec/matrix_forms.hpp"
#include "splitrec/recurrence.hpp"
#include "splitrec/riccati.hpp"
#include "splitrec/selftest.hpp"
#include "splitrec/series_io.hpp"
#include "splitrec/split.hpp"
#include "splitrec/types.hpp"
#include "splitrec/wave_slab.hpp"
