#pragma once

#include "doconto/encoder/cae.hpp"
#include "doconto/encoder/checkpoint.hpp"
#include "doconto/encoder/embedding.hpp"
#include "doconto/encoder/losses.hpp"
#include "doconto/encoder/optimizer.hpp"
#include "doconto/encoder/tensor.hpp"
#include "doconto/encoder/training.hpp"
#include "doconto/encoder/vae.hpp"
#include "doconto/encoder/vocabulary.hpp"
