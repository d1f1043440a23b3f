//! Interaction graphs between agents and their connectivity.
//!
//! Two graphs are built from a [`Microstate`]:
//!
//! * the *vis-disk* digraph, with an edge `j -> i` when agent `i` sees `j`
//!   through its sensing cone;
//! * the *disk* graph, with an undirected edge whenever two agents are
//!   strictly closer than `gamma`.
//!
//! Every vis-disk edge is also a disk edge (away from the measure-zero
//! `d == gamma` shell), so a disconnected disk graph certifies a
//! disconnected vis-disk graph. Connectivity of the disk graph is measured
//! with the Laplacian's second-smallest eigenvalue; the directed graph is
//! checked by reachability.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SwarmError};
use crate::geom::in_fov;
use crate::params::SwarmParams;
use crate::state::Microstate;

/// Eigenvalues in `[-EIG_CLAMP, 0)` are reported as exactly zero.
pub const EIG_CLAMP: f64 = 1e-9;

/// λ2 threshold below which the disk graph counts as disconnected.
pub const DEFAULT_EPS_LAMBDA: f64 = 1e-6;

/// Largest graph handled by the dense symmetric eigensolver.
pub const DENSE_MAX_N: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    adj: Vec<bool>,
    directed: bool,
}

impl InteractionGraph {
    /// Builds a graph from a row-major adjacency matrix where `a[i][j]`
    /// records the edge `j -> i`. The diagonal is ignored.
    pub fn from_rows(rows: &[Vec<u8>], directed: bool) -> Self {
        let n = rows.len();
        let mut adj = vec![false; n * n];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "adjacency must be square");
            for (j, &a) in row.iter().enumerate() {
                adj[i * n + j] = i != j && a != 0;
            }
        }
        InteractionGraph { n, adj, directed }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.has_edge(i, j) == self.has_edge(j, i)))
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.has_edge(i, j) as u8).collect())
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&a| a).count()
    }

    /// Dense graph Laplacian `D - A` using row sums as degrees.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (0..n).filter(|&k| self.has_edge(i, k)).count() as f64
            } else if self.has_edge(i, j) {
                -1.0
            } else {
                0.0
            }
        })
    }

    /// Number of weakly connected components.
    pub fn component_count(&self) -> usize {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for w in 0..n {
                    if !seen[w] && (self.has_edge(u, w) || self.has_edge(w, u)) {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// Digraph with `a_ij = 1` iff agent `i` sees agent `j`.
pub fn vis_disk_graph(state: &Microstate, params: &SwarmParams) -> InteractionGraph {
    let n = state.len();
    let mut adj = vec![false; n * n];
    for (i, obs) in state.agents.iter().enumerate() {
        for (j, tgt) in state.agents.iter().enumerate() {
            if i != j {
                adj[i * n + j] = in_fov(obs, tgt.x, tgt.y, params);
            }
        }
    }
    InteractionGraph {
        n,
        adj,
        directed: true,
    }
}

/// Undirected graph with an edge iff two agents are strictly closer than `gamma`.
pub fn disk_graph(state: &Microstate, params: &SwarmParams) -> InteractionGraph {
    let n = state.len();
    let g2 = params.gamma() * params.gamma();
    let mut adj = vec![false; n * n];
    for i in 0..n {
        let a = &state.agents[i];
        for j in (i + 1)..n {
            let b = &state.agents[j];
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let e = dx * dx + dy * dy < g2;
            adj[i * n + j] = e;
            adj[j * n + i] = e;
        }
    }
    InteractionGraph {
        n,
        adj,
        directed: false,
    }
}

/// Second-smallest eigenvalue of the Laplacian of an undirected graph.
///
/// Graphs with at most [`DENSE_MAX_N`] vertices go through a dense
/// symmetric eigendecomposition; larger ones through Lanczos on the
/// complement of the constant vector.
pub fn algebraic_connectivity(g: &InteractionGraph) -> Result<f64> {
    if g.directed || !g.is_symmetric() {
        return Err(SwarmError::DirectedGraph);
    }
    if g.n < 2 {
        return Ok(0.0);
    }
    let l = g.laplacian();
    let raw = if g.n <= DENSE_MAX_N {
        lambda2_dense(&l)
    } else {
        lambda2_lanczos(&l)
    };
    Ok(clamp_eig(raw))
}

fn clamp_eig(x: f64) -> f64 {
    if (-EIG_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// λ2 from the full spectrum of a symmetric matrix.
pub fn lambda2_dense(l: &DMatrix<f64>) -> f64 {
    let mut ev: Vec<f64> = SymmetricEigen::new(l.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1]
}

/// λ2 of a graph Laplacian by Lanczos iteration restricted to the
/// orthogonal complement of the all-ones vector (the Laplacian kernel
/// direction every graph shares). Uses full reorthogonalization and
/// restarts with a fresh direction on breakdown, so at most `n - 1`
/// iterations are ever needed.
pub fn lambda2_lanczos(l: &DMatrix<f64>) -> f64 {
    let n = l.nrows();
    let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let dim = n - 1;
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
    let mut alpha: Vec<f64> = Vec::with_capacity(dim);
    let mut beta: Vec<f64> = Vec::with_capacity(dim);
    let mut restart = 0u64;

    let project = |w: &mut DVector<f64>, basis: &[DVector<f64>]| {
        // two passes of Gram-Schmidt against the kernel and the basis
        for _ in 0..2 {
            let c = ones.dot(w);
            w.axpy(-c, &ones, 1.0);
            for q in basis {
                let c = q.dot(w);
                w.axpy(-c, q, 1.0);
            }
        }
    };
    let fresh = |seed: u64, basis: &[DVector<f64>]| {
        // deterministic non-degenerate start vector
        let mut w = DVector::from_fn(n, |i, _| ((i as f64 + 1.0) * (0.618_033_988_75 + seed as f64)).sin());
        project(&mut w, basis);
        let norm = w.norm();
        (w, norm)
    };

    let (mut q, norm) = fresh(restart, &basis);
    q /= norm;
    let mut last = f64::NAN;
    while basis.len() < dim {
        let mut w = l * &q;
        let a = q.dot(&w);
        basis.push(q.clone());
        alpha.push(a);
        project(&mut w, &basis);
        let b = w.norm();

        let m = alpha.len();
        if m >= 8 && (m.is_multiple_of(4) || m == dim) {
            let (ritz, resid) = smallest_ritz(&alpha, &beta, b);
            if resid < 1e-10 * (1.0 + ritz.abs()) || (ritz - last).abs() < 1e-14 {
                return ritz;
            }
            last = ritz;
        }
        if basis.len() == dim {
            break;
        }
        if b < 1e-10 {
            restart += 1;
            let (w2, norm2) = fresh(restart, &basis);
            if norm2 < 1e-10 {
                break;
            }
            beta.push(0.0);
            q = w2 / norm2;
        } else {
            beta.push(b);
            q = w / b;
        }
    }
    smallest_ritz(&alpha, &beta, 0.0).0
}

/// Smallest eigenvalue of the Lanczos tridiagonal and its residual bound.
fn smallest_ritz(alpha: &[f64], beta: &[f64], next_beta: f64) -> (f64, f64) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (k, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    let resid = (next_beta * eig.eigenvectors[(m - 1, k)]).abs();
    (val, resid)
}

/// True iff every vertex reaches every other along directed edges
/// (`j -> i` for `a_ij = 1`).
pub fn strong_connectivity(g: &InteractionGraph) -> bool {
    let n = g.n;
    if n <= 1 {
        return true;
    }
    let reach_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for w in 0..n {
                // forward: u -> w exists iff a_wu = 1
                let e = if forward { g.has_edge(w, u) } else { g.has_edge(u, w) };
                if e && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach_all(true) && reach_all(false)
}

/// False certifies the swarm has split (the disk graph, and therefore the
/// vis-disk graph, is disconnected). True does not certify that the
/// vis-disk graph is connected.
pub fn is_single_swarm(state: &Microstate, params: &SwarmParams) -> bool {
    if state.len() < 2 {
        return true;
    }
    let l2 = algebraic_connectivity(&disk_graph(state, params)).expect("disk graph is symmetric");
    l2 > DEFAULT_EPS_LAMBDA
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> InteractionGraph {
        InteractionGraph::from_rows(&vec![vec![1u8; n]; n], false)
    }

    #[test]
    fn known_spectra() {
        for n in 2..=8 {
            let l2 = algebraic_connectivity(&complete(n)).unwrap();
            assert!((l2 - n as f64).abs() < 1e-9, "K{n}: {l2}");
        }
        let two_k2 = InteractionGraph::from_rows(
            &[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]],
            false,
        );
        assert_eq!(algebraic_connectivity(&two_k2).unwrap(), 0.0);
        let p3 = InteractionGraph::from_rows(&[vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]], false);
        assert!((algebraic_connectivity(&p3).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn directed_input_is_rejected() {
        let g = InteractionGraph::from_rows(&[vec![0, 1], vec![0, 0]], true);
        assert_eq!(algebraic_connectivity(&g), Err(SwarmError::DirectedGraph));
    }

    #[test]
    fn reachability() {
        let cycle = InteractionGraph::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], true);
        assert!(strong_connectivity(&cycle));
        let ex = InteractionGraph::from_rows(&[vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]], true);
        assert!(!strong_connectivity(&ex));
        assert!(strong_connectivity(&complete(5)));
    }

    #[test]
    fn components() {
        let g = InteractionGraph::from_rows(
            &[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 0], vec![0, 0, 0, 0]],
            false,
        );
        assert_eq!(g.component_count(), 3);
        assert_eq!(complete(4).component_count(), 1);
    }

    #[test]
    fn lanczos_matches_dense_on_paths_and_cycles() {
        for n in [9usize, 20, 64, 90] {
            let mut rows = vec![vec![0u8; n]; n];
            for i in 0..n {
                let j = (i + 1) % n;
                rows[i][j] = 1;
                rows[j][i] = 1;
            }
            let l = InteractionGraph::from_rows(&rows, false).laplacian();
            let expect = 2.0 - 2.0 * (std::f64::consts::TAU / n as f64).cos();
            assert!((lambda2_dense(&l) - expect).abs() < 1e-9);
            assert!((lambda2_lanczos(&l) - expect).abs() < 1e-8, "n={n}");
        }
    }
}
