#pragma once

#include "algebra.hpp"
#include "coend.hpp"
#include "distlaw.hpp"
#include "errors.hpp"
#include "finord.hpp"
#include "monads.hpp"
#include "operad.hpp"
#include "operads.hpp"
#include "quotient.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "val.hpp"
#include "wcomm.hpp"
