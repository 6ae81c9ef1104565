#pragma once

#include "bench.hpp"
#include "geometry.hpp"
#include "graph.hpp"
#include "interaction.hpp"
#include "layout.hpp"
#include "navigation.hpp"
#include "octree.hpp"
#include "picking.hpp"
#include "scene.hpp"
#include "temporal.hpp"
