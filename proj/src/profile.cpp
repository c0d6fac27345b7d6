#include "xlsent/profile.hpp"

namespace xlsent::harness {

Hyperparameters default_hyperparameters() {
  Hyperparameters h;

  Profile& p = h.full;
  p.name = "full";
  p.dims = nn::Dims{300, 400, 50, 400, 400, false};
  p.batch_size = 10000;
  p.epochs_single_source = 7;
  p.epochs_multi_source = 2;
  p.clusters = 500;
  p.embedding_dim = 300;

  Profile& d = h.desk;
  d.name = "desk";
  d.dims = nn::Dims{16, 16, 8, 16, 16, false};
  d.batch_size = 32;
  d.epochs_single_source = 30;
  d.epochs_multi_source = 30;
  d.clusters = 50;
  d.embedding_dim = 16;
  return h;
}

Profile profile_by_name(const std::string& name) {
  Hyperparameters h = default_hyperparameters();
  if (name == "full") return h.full;
  if (name == "desk") return h.desk;
  throw InvalidArgument("unknown profile '" + name + "' (expected full or desk)");
}

}  // namespace xlsent::harness
