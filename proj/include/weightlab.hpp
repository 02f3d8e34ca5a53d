#pragma once

#include "weightlab/document.hpp"
#include "weightlab/error.hpp"
#include "weightlab/factorization.hpp"
#include "weightlab/families.hpp"
#include "weightlab/generate.hpp"
#include "weightlab/operators.hpp"
#include "weightlab/optimize.hpp"
#include "weightlab/report.hpp"
#include "weightlab/space.hpp"
#include "weightlab/suite.hpp"
#include "weightlab/theorems.hpp"
#include "weightlab/weights.hpp"
