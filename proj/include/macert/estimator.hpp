#pragma once

#include <functional>
#include <vector>

#include "macert/envelope.hpp"
#include "macert/geometry.hpp"

namespace macert {

/// Guaranteed L∞ bound assembled from a boundary term and the L² norms of the
/// data residual f - f_h over Ω and over the band Ω_{jδ}.
struct ErrorCertificate {
  double mu = 0.0;  // boundary term
  int j = 0;
  double delta = 0.0;  // minimal edge length
  double data_err_inner = 0.0;
  double data_err_global = 0.0;
  double rhs = 0.0;
  double sigma = 0.0;        // rhs - mu
  std::vector<double> eta;   // per cell
};

/// boundary + (1 - 2jδ)/2 · inner + 2^{1/4}/2 · (jδ)^{1/2} · global, the n = 2
/// bound with diam(Ω) = √2 and diam(Ω_{jδ}) = √2(1 - 2jδ).
[[nodiscard]] double bound_value(double boundary, double jdelta, double inner, double global);

/// Smallest j with value[j + 1] > value[j]; the last index if none.
[[nodiscard]] int select_j(const std::vector<double>& value);

/// f_h = 2 χ (det D²v_h)^{1/2} at the interior samples.
[[nodiscard]] std::vector<double> ma_density(const FeFunction& vh, const SampleSet& samples,
                                             const std::vector<bool>& contact);

/// f_h = ξ_ε(D²v_h) at the interior samples (F_ε(f_h; D²v_h) = 0).
[[nodiscard]] std::vector<double> hjb_density(const FeFunction& vh, const SampleSet& samples, double epsilon);

struct DataErrorNorms {
  double inner = 0.0;
  double global = 0.0;
  std::vector<double> cell_inner_sq;
  std::vector<double> cell_global_sq;
};

/// Quadrature norms of the per-sample residual over Ω and Ω_{jδ}; samples
/// outside the band contribute nothing to the inner norm.
[[nodiscard]] DataErrorNorms data_error_norms(const RectMesh& mesh, const SampleSet& samples,
                                              const std::vector<double>& residual, const InteriorBand& band);

/// Sweeps j over the bands of width δ = min edge length, selects j and fills
/// the per-cell indicators η(T) = jδ√2 |r|²_T + (1-2jδ)² |r|²_{T∩Ω_{jδ}}.
[[nodiscard]] ErrorCertificate certify(const RectMesh& mesh, const SampleSet& samples,
                                       const std::vector<double>& residual, double boundary_term);

/// Monge–Ampère bound for ‖u - Γ_{v_h}‖_∞ with μ = max |g - Γ| on the boundary
/// samples. safeguard adds half the boundary spacing times a Lipschitz
/// estimate of g - Γ along the boundary.
[[nodiscard]] ErrorCertificate rhs0(const FeFunction& vh, const std::function<double(Point2)>& f,
                                    const ScalarField& g, const SampleSet& samples, const LowerHull& hull,
                                    const std::vector<bool>& contact, bool safeguard = false);

/// HJB bound for ‖u_ε - v_h‖_∞ with boundary term max |g - v_h| on the
/// boundary samples and their midpoints.
[[nodiscard]] ErrorCertificate rhs_eps(const FeFunction& vh, const std::function<double(Point2)>& f,
                                       const ScalarField& g, double epsilon, const SampleSet& samples);

/// ‖g - v_h‖_{L∞(E)} per entry of mesh.boundary_edges(), sampled at n+1
/// equispaced points.
[[nodiscard]] std::vector<double> boundary_edge_errors(const FeFunction& vh, const ScalarField& g, int n = 16);

/// Boundary branch if σ/10 < max edge error: cells owning the ceil(E/5)
/// worst boundary edges. Otherwise the smallest prefix of cells sorted by η
/// (descending, ties by cell id) holding half of Σ η. Result sorted, unique.
[[nodiscard]] std::vector<int> mark_cells(const ErrorCertificate& cert, const std::vector<double>& edge_errors,
                                          const RectMesh& mesh);

}  // namespace macert
