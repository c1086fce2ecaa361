// SPDX-License-Identifier: Apache-2.0
// spreadid -- pilot design and spreading-function recovery on finite grids

#pragma once

#include <stdexcept>
#include <string>

namespace spreadid {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SPREADID_ERROR_TYPE(NAME)                 \
    struct NAME : Error {                         \
        using Error::Error;                       \
        explicit NAME() : Error(#NAME) {}         \
    }

SPREADID_ERROR_TYPE(IndexOutOfRange);
SPREADID_ERROR_TYPE(BudgetExceeded);
SPREADID_ERROR_TYPE(RankDeficient);
SPREADID_ERROR_TYPE(ShapeMismatch);
SPREADID_ERROR_TYPE(GridMismatch);
SPREADID_ERROR_TYPE(UnboundedInput);
SPREADID_ERROR_TYPE(NoCoverFound);
SPREADID_ERROR_TYPE(PackingFailed);
SPREADID_ERROR_TYPE(PlanNotOverspread);
SPREADID_ERROR_TYPE(NumericalRankFull);
SPREADID_ERROR_TYPE(DivergentTail);
SPREADID_ERROR_TYPE(GridTooCoarse);

#undef SPREADID_ERROR_TYPE

}  // namespace spreadid
