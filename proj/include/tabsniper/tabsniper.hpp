#pragma once

#include "tabsniper/box.hpp"
#include "tabsniper/csv.hpp"
#include "tabsniper/detection.hpp"
#include "tabsniper/docmodel.hpp"
#include "tabsniper/errors.hpp"
#include "tabsniper/hungarian.hpp"
#include "tabsniper/losses.hpp"
#include "tabsniper/metrics.hpp"
#include "tabsniper/naive_bayes.hpp"
#include "tabsniper/pipeline.hpp"
#include "tabsniper/random.hpp"
#include "tabsniper/report.hpp"
#include "tabsniper/spreading.hpp"
#include "tabsniper/synthgen.hpp"
#include "tabsniper/taxonomy.hpp"
#include "tabsniper/tdc_refine.hpp"
#include "tabsniper/text.hpp"
#include "tabsniper/text_corpus.hpp"
#include "tabsniper/tsr_post.hpp"
