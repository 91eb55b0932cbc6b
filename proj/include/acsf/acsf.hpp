#pragma once

#include "acsf/analysis.hpp"
#include "acsf/bitio.hpp"
#include "acsf/bytes.hpp"
#include "acsf/coder.hpp"
#include "acsf/container.hpp"
#include "acsf/errors.hpp"
#include "acsf/exact.hpp"
#include "acsf/hash.hpp"
#include "acsf/model.hpp"
#include "acsf/security.hpp"
