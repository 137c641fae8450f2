#pragma once

// Convenience header pulling in the whole public API.

#include "aid/clustering.hpp"
#include "aid/dataset.hpp"
#include "aid/diagnostics.hpp"
#include "aid/error.hpp"
#include "aid/framework.hpp"
#include "aid/io.hpp"
#include "aid/kernel.hpp"
#include "aid/lad.hpp"
#include "aid/lad_lp.hpp"
#include "aid/partition.hpp"
#include "aid/rng.hpp"
#include "aid/s3vm.hpp"
#include "aid/s3vm_bnb.hpp"
#include "aid/svm.hpp"
#include "aid/svm_qp.hpp"
#include "aid/synthetic.hpp"
