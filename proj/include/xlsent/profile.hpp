#pragma once

#include <string>

#include "xlsent/nnsent.hpp"

namespace xlsent::harness {

/// One complete set of experiment defaults.
struct Profile {
  std::string name;
  nn::Dims dims;
  int batch_size = 32;
  int epochs_single_source = 7;
  int epochs_multi_source = 2;
  double learning_rate = 1e-3;
  double lexicon_delta = 0.1;
  int clusters = 500;
  int embedding_dim = 300;
  int sgns_window = 5;
  int sgns_negatives = 5;
  int sgns_epochs = 5;
  double code_switch_rate = 0.3;
  int em_iterations = 5;
  double trigram_alpha = 0.1;
  double kl_floor = 1e-6;
};

struct Hyperparameters {
  Profile full;  // full-scale configuration
  Profile desk;   // small dimensions for laptop-scale runs
};

Hyperparameters default_hyperparameters();

/// "full" or "desk"; throws InvalidArgument otherwise.
Profile profile_by_name(const std::string& name);

}  // namespace xlsent::harness
