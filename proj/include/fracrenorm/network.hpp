#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fr {

// Symmetric nonnegative pair conductances on vertices 0..size-1.
// energy(f) = sum over unordered pairs w_xy (f(x) - f(y))^2.
class ConductanceForm {
 public:
  ConductanceForm() = default;
  explicit ConductanceForm(int size);
  explicit ConductanceForm(Eigen::MatrixXd weights);

  static ConductanceForm complete(int size, double w = 1.0);

  int size() const { return static_cast<int>(w_.rows()); }
  double weight(int x, int y) const { return w_(x, y); }
  void set_weight(int x, int y, double w);
  void add_weight(int x, int y, double w);
  const Eigen::MatrixXd& weights() const { return w_; }

  Eigen::MatrixXd laplacian() const;
  double mass() const;  // sum over unordered pairs
  double max_weight() const;
  ConductanceForm scaled(double c) const;
  // result(x, y) = this(perm[x], perm[y])
  ConductanceForm pullback(const std::vector<int>& perm) const;

  // Component label per vertex of the graph of weights > threshold.
  std::vector<int> support_components(double threshold = 0.0) const;
  bool is_connected(double threshold = 0.0) const;

  // Upper-triangle weights, row-major.
  Eigen::VectorXd edge_vector() const;
  static ConductanceForm from_edge_vector(int size, const Eigen::VectorXd& v);

 private:
  Eigen::MatrixXd w_;
};

double energy(const ConductanceForm& D, const Eigen::VectorXd& f);
double energy(const ConductanceForm& D, const Eigen::VectorXd& f, const Eigen::VectorXd& g);

struct TraceDiagnostics {
  int clamped = 0;           // tiny negatives set to zero
  double worst_negative = 0; // most negative traced weight, relative to max input weight
  std::vector<int> floating; // interior vertices not attached to the boundary
  std::vector<std::string> warnings;
};

// Trace (Schur complement) onto `boundary`; result vertex i is boundary[i].
ConductanceForm trace(const ConductanceForm& D, const std::vector<int>& boundary,
                      TraceDiagnostics* diag = nullptr);

struct HarmonicExtension {
  Eigen::VectorXd values;
  std::vector<int> floating;  // set to 0
};

HarmonicExtension harmonic_extension(const ConductanceForm& D, const std::vector<int>& boundary,
                                     const Eigen::VectorXd& f);

double effective_resistance(const ConductanceForm& D, int p, int q);
// All pairs; +inf between different support components.
Eigen::MatrixXd resistance_matrix(const ConductanceForm& D);

// (L h)(x) = sum_y w_xy (h(x) - h(y))
Eigen::VectorXd flows(const ConductanceForm& D, const Eigen::VectorXd& h);

// Star-mesh elimination of one vertex; remaining vertices keep their order.
ConductanceForm eliminate_vertex(const ConductanceForm& D, int v);

// Network on classes: weights between different classes are summed,
// within-class weights dropped. labels[x] in 0..num_classes-1.
ConductanceForm collapse(const ConductanceForm& D, const std::vector<int>& labels, int num_classes);

}  // namespace fr
