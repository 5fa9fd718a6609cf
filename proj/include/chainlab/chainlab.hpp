#pragma once

#include <chainlab/chain.hpp>
#include <chainlab/common.hpp>
#include <chainlab/consensus_rep.hpp>
#include <chainlab/errors.hpp>
#include <chainlab/escrow.hpp>
#include <chainlab/forkchoice.hpp>
#include <chainlab/lottery_rng.hpp>
#include <chainlab/numeric.hpp>
#include <chainlab/primitives.hpp>
#include <chainlab/replayguard.hpp>
#include <chainlab/vm_reentrancy.hpp>
