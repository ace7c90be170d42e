mod common;

use common::oracles;

#[test]
fn directed_matches_dense_matrix_formula() {
    oracles::clustering_dense_matrix(500, 10, 10);
}

#[test]
fn undirected_matches_triangle_count() {
    oracles::clustering_triangles(500, 10, 11);
}
