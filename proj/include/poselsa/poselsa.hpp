#pragma once

#include "poselsa/corpus.hpp"
#include "poselsa/dataset.hpp"
#include "poselsa/entrygen.hpp"
#include "poselsa/error.hpp"
#include "poselsa/eval.hpp"
#include "poselsa/grader.hpp"
#include "poselsa/log.hpp"
#include "poselsa/lsa.hpp"
#include "poselsa/model_io.hpp"
#include "poselsa/svd.hpp"
#include "poselsa/synth.hpp"
#include "poselsa/text.hpp"
#include "poselsa/wcm.hpp"
