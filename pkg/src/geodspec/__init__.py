"""Spectral approximation of closed manifolds by discrete forms built from edge lengths."""
from .complex import (SimplicialComplex, FaceIndex, build_complex, enumerate_faces,
                      check_closed_pseudomanifold)
from .metric import (MetricComplex, MeshStats, gram_matrix, simplex_volume_factor,
                     mesh_stats, validate_metric)
from .assembly import FormPair, assemble, assemble_mass, assemble_stiffness
from .eig import SpectralResult, solve, solve_dense, solve_iterative, cluster_eigenvalues
from .manifolds import (Sphere, FlatTorus, VertexedMesh, geodesic_distance,
                        generate_sphere_mesh, generate_torus_mesh, analytic_spectrum,
                        eigenfunction, torus_prolongation)
from .analysis import (restrict, restrict_clusters, compare_spectra, projection_residual,
                       theorem1_admissible_mesh, cheng_bound, minmax_compare, p1_oracle)
from .io import load_mesh, save_mesh

__version__ = "0.1.0"
