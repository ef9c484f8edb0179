#pragma once

#include "qfikit/io.hpp"
#include "qfikit/linalg.hpp"
#include "qfikit/model.hpp"
#include "qfikit/multiparam.hpp"
#include "qfikit/multiprobe.hpp"
#include "qfikit/oracle.hpp"
#include "qfikit/parallel.hpp"
#include "qfikit/qfi.hpp"
#include "qfikit/qubit.hpp"
