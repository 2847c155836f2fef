//! Form-consistent Q1 discretization of the strip quadratic form
//!
//! ```text
//!   b(φ, ψ) = ∫_Ω ∇φ·∇ψ dx dy + ∫_ℝ α(x) [φψ]_{y=ε} dx - ∫_ℝ α(x) [φψ]_{y=0} dx
//! ```
//!
//! on the truncated strip (-L, L) × (0, ε), as a generalized symmetric
//! pencil (K, M). Galerkin discretization inherits the form's lower bound
//! -‖α‖∞² exactly, which is what makes the shift-invert transformation and
//! the threshold tests sharp.

use crate::band::BandMatrix;
use crate::error::{Result, SpectralError};
use crate::profile::CouplingProfile;
use crate::quadrature;
use crate::transversal;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Artificial condition at the truncation ends x = ±L.
///
/// Neumann is natural (no term, constant-in-x modes survive, so the constant
/// coupling reproduces the threshold exactly); Dirichlet removes the two end
/// columns and brackets from the other side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndCondition {
    Neumann,
    Dirichlet,
}

/// Tensor-product mesh of the truncated strip (-L, L) × (0, ε).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripGrid {
    pub half_length: f64,
    pub eps: f64,
    pub nx: usize,
    pub ny: usize,
    pub ends: EndCondition,
}

impl StripGrid {
    pub fn new(
        half_length: f64,
        eps: f64,
        nx: usize,
        ny: usize,
        ends: EndCondition,
    ) -> Result<Self> {
        if !(half_length > 0.0) || !(eps > 0.0) {
            return Err(SpectralError::InvalidParameter(
                "strip dimensions must be positive".into(),
            ));
        }
        if nx < 4 || ny < 4 {
            return Err(SpectralError::InvalidParameter(format!(
                "cell counts must be at least 4, got {nx}x{ny}"
            )));
        }
        Ok(Self { half_length, eps, nx, ny, ends })
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.half_length / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.eps / self.ny as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        -self.half_length + self.hx() * ix as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.hy() * iy as f64
    }

    /// Flat node index, y-fastest (bandwidth ny + 2 in unknown numbering).
    pub fn node(&self, ix: usize, iy: usize) -> usize {
        ix * (self.ny + 1) + iy
    }

    pub fn node_coords(&self, flat: usize) -> (f64, f64) {
        let ix = flat / (self.ny + 1);
        let iy = flat % (self.ny + 1);
        (self.x(ix), self.y(iy))
    }

    /// Unknown index of a node, `None` for nodes eliminated by the end
    /// condition.
    pub fn unknown(&self, ix: usize, iy: usize) -> Option<usize> {
        match self.ends {
            EndCondition::Neumann => Some(self.node(ix, iy)),
            EndCondition::Dirichlet => {
                if ix == 0 || ix == self.nx {
                    None
                } else {
                    Some((ix - 1) * (self.ny + 1) + iy)
                }
            }
        }
    }

    pub fn unknown_count(&self) -> usize {
        match self.ends {
            EndCondition::Neumann => (self.nx + 1) * (self.ny + 1),
            EndCondition::Dirichlet => (self.nx - 1) * (self.ny + 1),
        }
    }
}

/// Which side of the pencil an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilSide {
    K,
    M,
}

/// Assembled generalized symmetric pencil (K, M) with its node ordering.
#[derive(Debug, Clone)]
pub struct OperatorPencil {
    k: BandMatrix,
    m: BandMatrix,
    /// unknown index -> flat grid node index (identity for synthetic pencils)
    ordering: Vec<usize>,
    bandwidth: usize,
    /// Any certified lower bound on the pencil spectrum; the assembled form
    /// uses -‖α‖∞², which the Galerkin discretization inherits.
    spectral_floor: f64,
}

impl OperatorPencil {
    /// Wraps externally built matrices; `spectral_floor` must underestimate
    /// the smallest pencil eigenvalue (it seeds the shift-invert transform).
    pub fn from_parts(k: BandMatrix, m: BandMatrix, spectral_floor: f64) -> Result<Self> {
        if k.n() != m.n() {
            return Err(SpectralError::DimensionMismatch { expected: k.n(), got: m.n() });
        }
        let bandwidth = k.bandwidth().max(m.bandwidth());
        let ordering = (0..k.n()).collect();
        Ok(Self { k, m, ordering, bandwidth, spectral_floor })
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn stiffness(&self) -> &BandMatrix {
        &self.k
    }

    pub fn mass(&self) -> &BandMatrix {
        &self.m
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn spectral_floor(&self) -> f64 {
        self.spectral_floor
    }

    /// Matrix-vector product with the selected side.
    pub fn apply(&self, side: PencilSide, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n() {
            return Err(SpectralError::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        Ok(match side {
            PencilSide::K => self.k.matvec(v),
            PencilSide::M => self.m.matvec(v),
        })
    }

    /// (vᵀKv) / (vᵀMv).
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let kv = self.k.matvec(v);
        let mv = self.m.matvec(v);
        let num: f64 = v.iter().zip(kv.iter()).map(|(a, b)| a * b).sum();
        let den: f64 = v.iter().zip(mv.iter()).map(|(a, b)| a * b).sum();
        num / den
    }

    /// Coefficient vector sampling f at the grid position of every unknown.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, grid: &StripGrid, f: F) -> Vec<f64> {
        self.ordering
            .iter()
            .map(|&flat| {
                let (x, y) = grid.node_coords(flat);
                f(x, y)
            })
            .collect()
    }

    /// Matrix Market coordinate dump (symmetric, lower triangle).
    pub fn write_matrix_market<W: Write>(&self, side: PencilSide, w: &mut W) -> std::io::Result<()> {
        let mat = match side {
            PencilSide::K => &self.k,
            PencilSide::M => &self.m,
        };
        let entries: Vec<(usize, usize, f64)> =
            mat.nonzeros().filter(|&(i, j, _)| j <= i).collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", mat.n(), mat.n(), entries.len())?;
        for (i, j, v) in entries {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
        Ok(())
    }
}

/// 1D linear-element stiffness and mass on an interval of length h.
fn local_1d(h: f64) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    let k = [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]];
    let m = [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];
    (k, m)
}

/// Q1 Galerkin assembly of the pencil (K, M) for a coupling profile.
///
/// Interior terms come from the exact tensor-product element matrices; the
/// signed boundary terms are integrated edge by edge with 3-point Gauss
/// quadrature of α (exact for the polynomial part).
pub fn assemble(grid: &StripGrid, profile: &CouplingProfile) -> OperatorPencil {
    let n = grid.unknown_count();
    let bw = grid.ny + 2;
    let mut k = BandMatrix::zeros(n, bw);
    let mut m = BandMatrix::zeros(n, bw);

    let (kx, mx) = local_1d(grid.hx());
    let (ky, my) = local_1d(grid.hy());

    // 4x4 element matrices, local node (a, b) = grid node (ix+a, iy+b)
    let mut ke = [[0.0; 4]; 4];
    let mut me = [[0.0; 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    ke[2 * a + b][2 * c + d] = kx[a][c] * my[b][d] + mx[a][c] * ky[b][d];
                    me[2 * a + b][2 * c + d] = mx[a][c] * my[b][d];
                }
            }
        }
    }

    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            let locals = [
                grid.unknown(ix, iy),
                grid.unknown(ix, iy + 1),
                grid.unknown(ix + 1, iy),
                grid.unknown(ix + 1, iy + 1),
            ];
            for (p, up) in locals.iter().enumerate() {
                let Some(row) = *up else { continue };
                for (q, uq) in locals.iter().enumerate() {
                    let Some(col) = *uq else { continue };
                    k.add(row, col, ke[p][q]);
                    m.add(row, col, me[p][q]);
                }
            }
        }
    }

    // boundary coupling: +α on the top edge, -α on the bottom edge
    let (gx, gw) = quadrature::gauss_legendre(3);
    let hx = grid.hx();
    for ix in 0..grid.nx {
        let x0 = grid.x(ix);
        let mid = x0 + 0.5 * hx;
        let half = 0.5 * hx;
        let mut edge = [[0.0; 2]; 2];
        for (t, w) in gx.iter().zip(gw.iter()) {
            let xg = mid + half * t;
            let a = profile.evaluate(xg);
            let l0 = 0.5 * (1.0 - t);
            let l1 = 0.5 * (1.0 + t);
            let shape = [l0, l1];
            for p in 0..2 {
                for q in 0..2 {
                    edge[p][q] += w * half * a * shape[p] * shape[q];
                }
            }
        }
        for (edge_iy, sign) in [(grid.ny, 1.0), (0, -1.0)] {
            let nodes = [grid.unknown(ix, edge_iy), grid.unknown(ix + 1, edge_iy)];
            for (p, up) in nodes.iter().enumerate() {
                let Some(row) = *up else { continue };
                for (q, uq) in nodes.iter().enumerate() {
                    let Some(col) = *uq else { continue };
                    k.add(row, col, sign * edge[p][q]);
                }
            }
        }
    }

    let sup = profile.sup_norm();
    let ordering: Vec<usize> = (0..grid.nx + 1)
        .flat_map(|ix| (0..grid.ny + 1).map(move |iy| (ix, iy)))
        .filter_map(|(ix, iy)| grid.unknown(ix, iy).map(|_| grid.node(ix, iy)))
        .collect();

    OperatorPencil {
        k,
        m,
        ordering,
        bandwidth: bw,
        spectral_floor: -sup * sup,
    }
}

/// Exact eigenvalues of the truncated continuous problem with constant
/// coupling: sums μⱼ + κₖ of transversal eigenvalues and longitudinal
/// Neumann/Dirichlet eigenvalues κₖ = (kπ/(2L))², sorted ascending.
///
/// The separation-of-variables oracle the discrete pencil must converge to.
pub fn separable_reference(
    grid: &StripGrid,
    alpha0: f64,
    j_max: usize,
    k_max: usize,
) -> Result<Vec<f64>> {
    let transversal: Vec<f64> = if alpha0 == 0.0 {
        transversal::neumann_reference(grid.eps, j_max)?
            .iter()
            .map(|m| m.eigenvalue)
            .collect()
    } else {
        let p = transversal::TransversalParams::new(alpha0, grid.eps)?;
        transversal::transversal_eigenvalues(&p, j_max)?
    };
    let k_start = match grid.ends {
        EndCondition::Neumann => 0,
        EndCondition::Dirichlet => 1,
    };
    let mut out = Vec::new();
    for mu in &transversal {
        for kk in k_start..=k_max.max(k_start) {
            let kappa = kk as f64 * std::f64::consts::PI / (2.0 * grid.half_length);
            out.push(mu + kappa * kappa);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid(ends: EndCondition) -> StripGrid {
        StripGrid::new(5.0, 1.0, 12, 4, ends).unwrap()
    }

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(StripGrid::new(0.0, 1.0, 8, 8, EndCondition::Neumann).is_err());
        assert!(StripGrid::new(1.0, 1.0, 3, 8, EndCondition::Neumann).is_err());
        assert!(StripGrid::new(1.0, -1.0, 8, 8, EndCondition::Neumann).is_err());
    }

    #[test]
    fn unknown_numbering_dirichlet_drops_ends() {
        let g = small_grid(EndCondition::Dirichlet);
        assert_eq!(g.unknown(0, 2), None);
        assert_eq!(g.unknown(12, 0), None);
        assert_eq!(g.unknown(1, 0), Some(0));
        assert_eq!(g.unknown_count(), 11 * 5);
    }

    #[test]
    fn assembled_stiffness_exactly_symmetric() {
        let g = small_grid(EndCondition::Neumann);
        let profile = CouplingProfile::gaussian_bump(1.0, 0.5, 1.0).unwrap();
        let p = assemble(&g, &profile);
        assert_eq!(p.stiffness().symmetry_defect(), 0.0);
        assert_eq!(p.mass().symmetry_defect(), 0.0);
        assert_eq!(p.bandwidth(), g.ny + 2);
    }

    #[test]
    fn neumann_kernel_contains_constants() {
        // α ≡ 0: K is the Neumann stiffness matrix, constants in its kernel
        let g = small_grid(EndCondition::Neumann);
        let p = assemble(&g, &CouplingProfile::constant(0.0));
        let ones = vec![1.0; p.n()];
        let kv = p.apply(PencilSide::K, &ones).unwrap();
        for v in kv {
            assert!(v.abs() < 1e-13, "K·1 entry {v:e}");
        }
    }

    #[test]
    fn mass_row_sums_partition_area() {
        // 1ᵀ M 1 = area of the strip (partition of unity)
        let g = small_grid(EndCondition::Neumann);
        let p = assemble(&g, &CouplingProfile::constant(1.0));
        let ones = vec![1.0; p.n()];
        let mv = p.apply(PencilSide::M, &ones).unwrap();
        let total: f64 = mv.iter().sum();
        let area = 2.0 * g.half_length * g.eps;
        assert!((total - area).abs() < 1e-12, "got {total}, want {area}");
    }

    #[test]
    fn apply_extracts_columns() {
        let g = small_grid(EndCondition::Neumann);
        let p = assemble(&g, &CouplingProfile::constant(1.0));
        let n = p.n();
        let mut e = vec![0.0; n];
        e[7] = 1.0;
        let col = p.apply(PencilSide::K, &e).unwrap();
        for (i, v) in col.iter().enumerate() {
            assert_eq!(*v, p.stiffness().get(i, 7));
        }
        assert!(matches!(
            p.apply(PencilSide::K, &[1.0]),
            Err(SpectralError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn separable_reference_constant_coupling() {
        let g = StripGrid::new(5.0, 1.0, 8, 4, EndCondition::Neumann).unwrap();
        let vals = separable_reference(&g, 1.0, 0, 2).unwrap();
        let kappa = std::f64::consts::PI / 10.0;
        let expect = [-1.0, -1.0 + kappa * kappa, -1.0 + 4.0 * kappa * kappa];
        for (v, e) in vals.iter().zip(expect.iter()) {
            assert!((v - e).abs() < 1e-14, "{v} vs {e}");
        }
    }

    #[test]
    fn separable_reference_dirichlet_skips_constant_mode() {
        let g = StripGrid::new(5.0, 1.0, 8, 4, EndCondition::Dirichlet).unwrap();
        let vals = separable_reference(&g, 1.0, 0, 3).unwrap();
        let kappa = std::f64::consts::PI / 10.0;
        assert!((vals[0] - (-1.0 + kappa * kappa)).abs() < 1e-14);
        assert!(vals[0] > -1.0);
    }

    #[test]
    fn separable_reference_neumann_coupling_zero() {
        let g = StripGrid::new(5.0, 1.0, 8, 4, EndCondition::Neumann).unwrap();
        let vals = separable_reference(&g, 0.0, 1, 1).unwrap();
        assert_eq!(vals[0], 0.0);
    }

    #[test]
    fn matrix_market_roundtrip() {
        let g = small_grid(EndCondition::Neumann);
        let p = assemble(&g, &CouplingProfile::constant(1.0));
        let mut buf = Vec::new();
        p.write_matrix_market(PencilSide::K, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "%%MatrixMarket matrix coordinate real symmetric"
        );
        let header: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(header[0], p.n());
        assert_eq!(header[1], p.n());
        let mut count = 0;
        for line in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let (i, j): (usize, usize) = (tok[0].parse().unwrap(), tok[1].parse().unwrap());
            let v: f64 = tok[2].parse().unwrap();
            assert!(j <= i, "upper-triangle entry in symmetric dump");
            assert_eq!(v, p.stiffness().get(i - 1, j - 1));
            count += 1;
        }
        assert_eq!(count, header[2]);
    }
}
