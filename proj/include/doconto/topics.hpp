#pragma once

#include "doconto/topics/lda.hpp"
#include "doconto/topics/lexicon.hpp"
