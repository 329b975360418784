#pragma once

#include "doconto/ontology/annotate.hpp"
#include "doconto/ontology/graph.hpp"
#include "doconto/ontology/mapping.hpp"
#include "doconto/ontology/turtle.hpp"
