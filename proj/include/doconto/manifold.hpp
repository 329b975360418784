#pragma once

#include "doconto/manifold/clusters.hpp"
#include "doconto/manifold/kmeans.hpp"
#include "doconto/manifold/tsne.hpp"
