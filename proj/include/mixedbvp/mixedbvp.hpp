#pragma once

#include "mixedbvp/core/beta.hpp"
#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/grid.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/core/operator.hpp"
#include "mixedbvp/core/problem.hpp"
#include "mixedbvp/core/report.hpp"
#include "mixedbvp/pucci/eigen.hpp"
#include "mixedbvp/pucci/hypotheses.hpp"
#include "mixedbvp/pucci/pucci.hpp"
#include "mixedbvp/geometry/diffeo.hpp"
#include "mixedbvp/geometry/domain.hpp"
#include "mixedbvp/barriers/certificate.hpp"
#include "mixedbvp/barriers/conical.hpp"
#include "mixedbvp/barriers/log_barrier.hpp"
#include "mixedbvp/barriers/types.hpp"
#include "mixedbvp/scheme/discretization.hpp"
#include "mixedbvp/scheme/stencil.hpp"
#include "mixedbvp/solver/solver.hpp"
#include "mixedbvp/analysis/refinement.hpp"
#include "mixedbvp/analysis/regularity.hpp"
#include "mixedbvp/io/config.hpp"
#include "mixedbvp/io/csv.hpp"
#include "mixedbvp/io/json.hpp"
