// samples/minimal_fit.cpp

// Copyright 2026  JIP Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Fit the shared subspace on one synthetic problem and print how the
// unlabeled-target accuracy evolves over the pseudo-label iterations.

#include <cstdio>

#include "jip/classifier.hpp"
#include "jip/solver.hpp"
#include "jip/synth.hpp"

int main() {
  using namespace jip;

  SynthSpec spec;  // 4 classes, 30-d source, 20-d target, 30 pairs
  const SyntheticDataset sd = synth_generate(spec, 7);
  const auto eval = unlabeled_indices(sd.data.target.labels);
  const Labels truth = select_labels(sd.target_truth, eval);

  JipHyperParams p;
  p.m = 10;
  p.alpha = 0.1;
  p.lambda = 0.1;
  const JipModel model = fit(sd.data, p);

  std::printf("initial  acc %.3f\n", accuracy(select_labels(model.initial_labels, eval), truth));
  for (std::size_t t = 0; t < model.iterations.size(); ++t) {
    const IterationRecord& it = model.iterations[t];
    std::printf("iter %zu   acc %.3f  changed %zu  dim %zu\n", t + 1,
                accuracy(select_labels(it.target_labels, eval), truth), it.changed,
                it.effective_dim);
  }

  // the fitted model also labels fresh target samples
  const Labels again = model.predict_target(sd.data.target.features.select_columns(eval));
  std::printf("predict  acc %.3f\n", accuracy(again, truth));
  for (const auto& w : model.warnings) std::printf("warning: %s\n", w.c_str());
  return 0;
}
