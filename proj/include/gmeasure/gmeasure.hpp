#pragma once

#include "gmeasure/blockseq.hpp"
#include "gmeasure/exact.hpp"
#include "gmeasure/kernel.hpp"
#include "gmeasure/sample.hpp"
#include "gmeasure/stats.hpp"
#include "gmeasure/version.hpp"
