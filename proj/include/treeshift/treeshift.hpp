#pragma once

#include "treeshift/corpus.hpp"
#include "treeshift/hypercyclic_lab.hpp"
#include "treeshift/lip_space.hpp"
#include "treeshift/norm_engine.hpp"
#include "treeshift/report.hpp"
#include "treeshift/scalar.hpp"
#include "treeshift/shift_ops.hpp"
#include "treeshift/spectral_lab.hpp"
#include "treeshift/tree_function.hpp"
#include "treeshift/tree_spec.hpp"
#include "treeshift/tree_view.hpp"
#include "treeshift/vertex.hpp"
